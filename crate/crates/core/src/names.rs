//! Interned-by-`Arc` identifiers: sorts, variables, symbols and elements of the
//! ambient universe.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                $name(Arc::from(s.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", &self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(Arc::from(s))
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d).map($name::from)
            }
        }
    };
}

name_type!(
    /// A sort name of a many-sorted signature.
    Sort
);
name_type!(
    /// A variable name.
    Var
);
name_type!(
    /// A relation or function symbol.
    Sym
);
name_type!(
    /// An element of the ambient universe from which all structures draw their
    /// carriers.
    ///
    /// Elements are compared in *natural* order: runs of digits compare
    /// numerically, so `d2 < d10`. The same name may live in carriers of
    /// several sorts; a tuple's sorts always come from the context it is
    /// matched against.
    Elem
);

macro_rules! lexical_order {
    ($name:ident) => {
        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                self.0.cmp(&other.0)
            }
        }
    };
}

lexical_order!(Sort);
lexical_order!(Var);
lexical_order!(Sym);

impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Elem {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl Elem {
    /// Pairing encoder used for product carriers: `(a,b,c)`.
    pub fn tuple(parts: &[Elem]) -> Elem {
        let mut s = String::from("(");
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(p.as_str());
        }
        s.push(')');
        Elem::from(s)
    }
}

/// Natural ("version") ordering on strings, total and consistent with equality.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let na = trim_zeros(&ab[si..i]);
            let nb = trim_zeros(&bb[sj..j]);
            let ord = na.len().cmp(&nb.len()).then_with(|| na.cmp(nb));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = ab[i].cmp(&bb[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| a.cmp(b))
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let k = digits.iter().take_while(|&&d| d == b'0').count();
    &digits[k.min(digits.len().saturating_sub(1))..]
}

/// Supplies names `{prefix}{k}` for increasing `k`, skipping names already in use.
#[derive(Debug, Clone)]
pub struct FreshNames {
    prefix: String,
    next: usize,
    taken: std::collections::HashSet<String>,
}

impl FreshNames {
    pub fn new(prefix: impl Into<String>) -> Self {
        FreshNames { prefix: prefix.into(), next: 0, taken: Default::default() }
    }

    pub fn avoiding<I, S>(prefix: impl Into<String>, taken: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut f = FreshNames::new(prefix);
        f.taken = taken.into_iter().map(|s| s.as_ref().to_string()).collect();
        f
    }

    pub fn reserve(&mut self, name: impl AsRef<str>) {
        self.taken.insert(name.as_ref().to_string());
    }

    pub fn next_name(&mut self) -> String {
        loop {
            let candidate = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order_compares_digit_runs_numerically() {
        let mut v: Vec<Elem> = ["d10", "d2", "a", "d1", "b0", "d02"].iter().map(Elem::new).collect();
        v.sort();
        let names: Vec<&str> = v.iter().map(|e| e.as_str()).collect();
        assert_eq!(names, ["a", "b0", "d1", "d02", "d2", "d10"]);
    }

    #[test]
    fn natural_order_is_consistent_with_equality() {
        assert_ne!(natural_cmp("d2", "d02"), Ordering::Equal);
        assert_eq!(natural_cmp("x", "x"), Ordering::Equal);
    }

    #[test]
    fn fresh_names_skip_taken() {
        let mut f = FreshNames::avoiding("d", ["d0", "d2"]);
        assert_eq!(f.next_name(), "d1");
        assert_eq!(f.next_name(), "d3");
    }
}
