use super::{HomOpenBox, PresentedOpen, TopologyError};
use crate::model::{Colimit, DirectedDiagram, Structure};

/// The least stage `d₀` such that every `d ≥ d₀` lies in `o`, if any.
pub fn tail_index(d: &DirectedDiagram, o: &PresentedOpen) -> Result<Option<usize>, TopologyError> {
    let inside: Vec<bool> = d.models().iter().map(|m| o.contains(m)).collect::<Result<_, _>>()?;
    Ok((0..d.len()).find(|&d0| d.up_set(d0).into_iter().all(|e| inside[e])))
}

/// Whether the net `d ↦ M_d` eventually enters every listed open that
/// contains `m` (the colimit). Opens missing `m` impose nothing.
pub fn net_converges(d: &DirectedDiagram, m: &Structure, opens: &[PresentedOpen]) -> Result<bool, TopologyError> {
    for o in opens {
        if o.contains(m)? && tail_index(d, o)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The least `d₀ ≥ stage` such that `g_{stage,e}` lies in `b` for every
/// `e ≥ d₀`, if any.
pub fn hom_net_tail(d: &DirectedDiagram, stage: usize, b: &HomOpenBox) -> Result<Option<usize>, TopologyError> {
    let ups = d.up_set(stage);
    let mut inside = vec![false; d.len()];
    for &e in &ups {
        inside[e] = b.contains(d.arrow(stage, e).expect("e is above stage"))?;
    }
    Ok(ups.iter().copied().find(|&d0| d.up_set(d0).into_iter().all(|e| inside[e])))
}

/// Whether, for every stage `d`, the net `e ↦ g_{d,e}` eventually enters
/// every listed box that contains the cocone map `f_d`.
pub fn hom_net_converges(d: &DirectedDiagram, colimit: &Colimit, boxes: &[HomOpenBox]) -> Result<bool, TopologyError> {
    for stage in 0..d.len() {
        for b in boxes {
            if b.contains(&colimit.cocone[stage])? && hom_net_tail(d, stage, b)?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
