use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Integer wavenumber on the torus lattice. Components past the grid
/// dimension are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wavenumber(pub [i64; 3]);

impl Wavenumber {
    pub const ZERO: Wavenumber = Wavenumber([0; 3]);

    pub fn new(components: &[i64]) -> Self {
        assert!(components.len() <= 3, "at most three spatial dimensions");
        let mut k = [0; 3];
        k[..components.len()].copy_from_slice(components);
        Wavenumber(k)
    }

    /// Unit vector along `axis`, scaled by `m`.
    pub fn axis(axis: usize, m: i64) -> Self {
        let mut k = [0; 3];
        k[axis] = m;
        Wavenumber(k)
    }

    #[inline]
    pub fn get(&self, axis: usize) -> i64 {
        self.0[axis]
    }

    #[inline]
    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 3]
    }

    /// True for exactly one member of every `{k, −k}` pair with `k ≠ 0`:
    /// the first nonzero component is positive.
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.0.iter()).map(|(x, &k)| k as f64 * x).sum()
    }
}

impl std::ops::Neg for Wavenumber {
    type Output = Wavenumber;
    fn neg(self) -> Wavenumber {
        Wavenumber([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl fmt::Display for Wavenumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Uniform discretization of `[0, 2π)^d` with `n` points per axis.
///
/// Flat indices are row-major with axis 0 slowest. Along each axis the
/// storage index `j` carries wavenumber `j` for `j ≤ n/2` and `j − n`
/// otherwise, so the active set is `{−n/2+1, …, n/2}^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct TorusGrid {
    d: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    d: usize,
    n: usize,
}

impl TryFrom<RawGrid> for TorusGrid {
    type Error = crate::Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        TorusGrid::new(raw.d, raw.n)
    }
}

impl From<TorusGrid> for RawGrid {
    fn from(g: TorusGrid) -> Self {
        RawGrid { d: g.d, n: g.n }
    }
}

impl TorusGrid {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return param(format!("dimension d = {d} must be 1, 2 or 3"));
        }
        if n < 8 || n % 2 != 0 {
            return param(format!("modes per axis n = {n} must be even and at least 8"));
        }
        Ok(TorusGrid { d, n })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Points (and modes) per axis.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of lattice points, `n^d`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    fn axis_wavenumber(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    #[inline]
    fn axis_slot(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn wavenumber(&self, flat: usize) -> Wavenumber {
        let mut k = [0i64; 3];
        let mut rem = flat;
        for axis in (0..self.d).rev() {
            k[axis] = self.axis_wavenumber(rem % self.n);
            rem /= self.n;
        }
        Wavenumber(k)
    }

    /// Flat index of `k` if it lies in the active set.
    pub fn index_of(&self, k: Wavenumber) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let mut idx = 0;
        for axis in 0..self.d {
            let c = k.get(axis);
            if c <= -half || c > half {
                return None;
            }
            idx = idx * self.n + self.axis_slot(c);
        }
        if k.0[self.d..].iter().any(|&c| c != 0) {
            return None;
        }
        Some(idx)
    }

    /// Flat index of the aliased partner `−k mod n`.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        let mut rem = flat;
        for _ in 0..self.d {
            let j = rem % self.n;
            rem /= self.n;
            idx += ((self.n - j) % self.n) * stride;
            stride *= self.n;
        }
        idx
    }

    /// True when some component sits on the Nyquist frequency `n/2`.
    pub fn is_nyquist(&self, k: Wavenumber) -> bool {
        let half = (self.n / 2) as i64;
        (0..self.d).any(|a| k.get(a).abs() == half)
    }

    /// Two-thirds rule: every `|k_i| ≤ n/3`.
    pub fn in_dealias_band(&self, k: Wavenumber) -> bool {
        (0..self.d).all(|a| 3 * k.get(a).unsigned_abs() as usize <= self.n)
    }

    /// Largest integer `K` with `3K ≤ n`.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Physical coordinates of lattice point `flat`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = 2.0 * PI / self.n as f64;
        let mut x = [0.0; 3];
        let mut rem = flat;
        for axis in (0..self.d).rev() {
            x[axis] = (rem % self.n) as f64 * h;
            rem /= self.n;
        }
        x
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = Wavenumber> + '_ {
        (0..self.len()).map(move |i| self.wavenumber(i))
    }

    /// Wavenumbers with `|k|_∞ ≤ kmax`, in lexicographic order. The order
    /// does not depend on `n`, so draws keyed on it are resolution
    /// independent.
    pub fn box_modes(&self, kmax: usize) -> Vec<Wavenumber> {
        let r = kmax as i64;
        let mut out = vec![Wavenumber::ZERO];
        for axis in 0..self.d {
            out = out
                .into_iter()
                .flat_map(|k| {
                    (-r..=r).map(move |c| {
                        let mut k = k;
                        k.0[axis] = c;
                        k
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::new(0, 16).is_err());
        assert!(TorusGrid::new(4, 16).is_err());
        assert!(TorusGrid::new(2, 6).is_err());
        assert!(TorusGrid::new(2, 15).is_err());
        assert!(TorusGrid::new(3, 8).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = TorusGrid::new(2, 8).unwrap();
        assert_eq!(g.len(), 64);
        for flat in 0..g.len() {
            let k = g.wavenumber(flat);
            assert_eq!(g.index_of(k), Some(flat));
            for a in 0..2 {
                assert!(k.get(a) > -4 && k.get(a) <= 4);
            }
            let c = g.conjugate_index(flat);
            let kc = g.wavenumber(c);
            for a in 0..2 {
                assert_eq!((k.get(a) + kc.get(a)).rem_euclid(8), 0);
            }
        }
        assert_eq!(g.index_of(Wavenumber::new(&[-4, 0])), None);
        assert_eq!(g.index_of(Wavenumber::new(&[1, 0, 1])), None);
    }

    #[test]
    fn box_modes_are_ordered_and_complete() {
        let g = TorusGrid::new(2, 16).unwrap();
        let modes = g.box_modes(1);
        assert_eq!(modes.len(), 9);
        assert!(modes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(modes.iter().filter(|k| k.is_positive()).count(), 4);
    }

    #[test]
    fn dealias_band() {
        let g = TorusGrid::new(1, 64).unwrap();
        assert!(g.in_dealias_band(Wavenumber::new(&[21])));
        assert!(!g.in_dealias_band(Wavenumber::new(&[22])));
        assert!(g.is_nyquist(Wavenumber::new(&[32])));
    }
}
