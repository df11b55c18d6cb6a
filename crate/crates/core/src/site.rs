use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 6;

/// A point of Z^d stored in a fixed-width array; coordinates past the lattice
/// dimension are zero. The dimension itself lives with the walk or field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site(pub [i64; MAX_DIM]);

impl Site {
    pub const ORIGIN: Site = Site([0; MAX_DIM]);

    pub fn from_slice(coords: &[i64]) -> Result<Site> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::usage(format!(
                "site has {} coordinates; supported dimensions are 1..={MAX_DIM}",
                coords.len()
            )));
        }
        let mut s = [0i64; MAX_DIM];
        s[..coords.len()].copy_from_slice(coords);
        Ok(Site(s))
    }

    pub fn on_axis(axis: usize, value: i64) -> Site {
        let mut s = [0i64; MAX_DIM];
        s[axis] = value;
        Site(s)
    }

    #[inline(always)]
    pub fn coords(&self, dim: usize) -> &[i64] {
        &self.0[..dim]
    }

    #[inline(always)]
    pub fn is_origin(&self) -> bool {
        self.0 == [0; MAX_DIM]
    }

    /// Saturating coordinate-wise addition.
    #[inline(always)]
    pub fn add(&self, step: &Site) -> Site {
        let mut out = self.0;
        for (o, s) in out.iter_mut().zip(step.0.iter()) {
            *o = o.saturating_add(*s);
        }
        Site(out)
    }

    #[inline(always)]
    pub fn neg(&self) -> Site {
        let mut out = self.0;
        for o in out.iter_mut() {
            *o = -*o;
        }
        Site(out)
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).map_or(1, |p| p + 1);
        f.debug_list().entries(&self.0[..last]).finish()
    }
}

impl Serialize for Site {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let last = self.0.iter().rposition(|&c| c != 0).map_or(1, |p| p + 1);
        self.0[..last].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let v: Vec<i64> = Vec::deserialize(deserializer)?;
        Site::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::usage(format!(
            "dimension {dim} outside supported range 1..={MAX_DIM}"
        )));
    }
    Ok(())
}
