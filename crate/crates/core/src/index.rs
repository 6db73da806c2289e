//! Parameter and point types shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Type multi-index `alpha` in `(-1, inf)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AlphaIndex(Vec<f64>);

impl AlphaIndex {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("alpha must have at least one component".into()));
        }
        if let Some(a) = components.iter().find(|a| !(a.is_finite() && **a > -1.0)) {
            return Err(Error::Domain(format!(
                "alpha component {a} outside the admissible range (-1, inf)"
            )));
        }
        Ok(Self(components))
    }

    /// Same value in every coordinate.
    pub fn uniform(a: f64, d: usize) -> Result<Self> {
        Self::new(vec![a; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    /// `|alpha| = alpha_1 + ... + alpha_d`.
    pub fn length(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Bottom of the spectrum, `2|alpha| + 2d`.
    pub fn ground_eigenvalue(&self) -> f64 {
        2.0 * self.length() + 2.0 * self.dim() as f64
    }

    /// Eigenvalue `4|k| + 2|alpha| + 2d` attached to `l_k`.
    pub fn eigenvalue(&self, k_len: usize) -> f64 {
        4.0 * k_len as f64 + self.ground_eigenvalue()
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: d,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for AlphaIndex {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AlphaIndex> for Vec<f64> {
    fn from(a: AlphaIndex) -> Self {
        a.0
    }
}

impl std::fmt::Display for AlphaIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Multi-index of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        Self(components)
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    /// `e_j` in dimension `d`.
    pub fn unit(j: usize, d: usize) -> Self {
        let mut v = vec![0; d];
        v[j] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    /// `|n| = n_1 + ... + n_d`.
    pub fn length(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// All multi-indices of dimension `d` with `|k| <= k_max`, ordered by shell
    /// `|k|` and then lexicographically.
    pub fn enumerate(d: usize, k_max: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for shell in 0..=k_max {
            let mut cur = vec![0usize; d];
            push_shell(&mut out, &mut cur, 0, shell);
        }
        out
    }
}

fn push_shell(out: &mut Vec<MultiIndex>, cur: &mut Vec<usize>, pos: usize, remaining: usize) {
    let d = cur.len();
    if pos == d - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for c in (0..=remaining).rev() {
        cur[pos] = c;
        push_shell(out, cur, pos + 1, remaining - c);
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Point of `R_+^d = (0, inf)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PointRd(Vec<f64>);

impl PointRd {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("point must have at least one coordinate".into()));
        }
        if let Some(x) = coords.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Domain(format!(
                "coordinate {x} is not strictly positive"
            )));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn dist(&self, other: &PointRd) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Copy with coordinate `j` replaced. Fails if the new value leaves `R_+`.
    pub fn with_coord(&self, j: usize, value: f64) -> Result<Self> {
        let mut c = self.0.clone();
        c[j] = value;
        Self::new(c)
    }

    /// `self + h * dir`.
    pub fn offset(&self, dir: &[f64], h: f64) -> Result<Self> {
        Self::new(self.0.iter().zip(dir).map(|(x, v)| x + h * v).collect())
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for PointRd {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PointRd> for Vec<f64> {
    fn from(p: PointRd) -> Self {
        p.0
    }
}
