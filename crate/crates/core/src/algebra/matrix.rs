use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::AlgebraError;
use crate::scalar::poly::Var;
use crate::scalar::{FieldElement, Polynomial, RatFunc};

pub type Vector = Vec<RatFunc>;

pub fn zero_vec(n: usize) -> Vector {
    vec![RatFunc::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = RatFunc::one();
    v
}

pub fn vec_add(a: &[RatFunc], b: &[RatFunc]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vec_sub(a: &[RatFunc], b: &[RatFunc]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vec_scale(a: &[RatFunc], k: &RatFunc) -> Vector {
    a.iter().map(|x| x.mul(k)).collect()
}

pub fn vec_is_zero(a: &[RatFunc]) -> bool {
    a.iter().all(RatFunc::is_zero)
}

/// Square matrix of a linear map; column `j` is the image of `e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    n: usize,
    entries: Vec<RatFunc>,
}

impl OperatorMatrix {
    pub fn zero(n: usize) -> Self {
        OperatorMatrix { n, entries: vec![RatFunc::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, RatFunc::one())
    }

    pub fn scalar(n: usize, c: RatFunc) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    /// `E_{rc}` with 0-based indices.
    pub fn unit(n: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zero(n);
        m.entries[r * n + c] = RatFunc::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(AlgebraError::DimensionMismatch { expected: n, got: row.len() });
            }
            entries.extend(row);
        }
        Ok(OperatorMatrix { n, entries })
    }

    /// Generic matrix whose entries are the variables `{prefix}{r}{c}` (1-based).
    pub fn generic(n: usize, prefix: &str) -> Self {
        let mut m = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                m.entries[r * n + c] = RatFunc::var(&format!("{prefix}{}_{}", r + 1, c + 1));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &RatFunc {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RatFunc) {
        self.entries[r * self.n + c] = v;
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<RatFunc>> {
        self.entries.chunks(self.n).map(<[RatFunc]>::to_vec).collect()
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.n).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn apply(&self, v: &[RatFunc]) -> Vector {
        let n = self.n;
        let mut out = zero_vec(n);
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, slot) in out.iter_mut().enumerate() {
                let a = &self.entries[r * n + c];
                if !a.is_zero() {
                    *slot = slot.add(&a.mul(x));
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        let n = self.n;
        let mut out = Self::zero(n);
        for c in 0..n {
            let col = self.apply(&other.column(c));
            for (r, v) in col.into_iter().enumerate() {
                out.entries[r * n + c] = v;
            }
        }
        out
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { n: self.n, entries: vec_add(&self.entries, &other.entries) }
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { n: self.n, entries: vec_sub(&self.entries, &other.entries) }
    }

    pub fn scale(&self, k: &RatFunc) -> OperatorMatrix {
        OperatorMatrix { n: self.n, entries: vec_scale(&self.entries, k) }
    }

    pub fn is_zero(&self) -> bool {
        vec_is_zero(&self.entries)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.entries.iter().flat_map(RatFunc::variables).collect()
    }

    pub fn roots_used(&self) -> BTreeSet<i64> {
        self.entries.iter().flat_map(RatFunc::roots_used).collect()
    }

    /// Denominators that must not vanish for the entries to be defined.
    pub fn side_conditions(&self) -> Vec<Polynomial> {
        collect_side_conditions(self.entries.iter())
    }

    pub fn substitute_partial(&self, values: &BTreeMap<String, FieldElement>) -> Result<OperatorMatrix, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.substitute_partial(values))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OperatorMatrix { n: self.n, entries })
    }

    pub fn compose_vars(&self, values: &BTreeMap<String, RatFunc>) -> Result<OperatorMatrix, AlgebraError> {
        let entries = self.entries.iter().map(|e| e.compose(values)).collect::<Result<Vec<_>, _>>()?;
        Ok(OperatorMatrix { n: self.n, entries })
    }

    /// Determinant by cofactor-free elimination over the rational-function field.
    pub fn det(&self) -> RatFunc {
        let n = self.n;
        let mut a = self.rows();
        let mut det = RatFunc::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return RatFunc::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = det.neg();
            }
            let p = a[col][col].clone();
            det = det.mul(&p);
            let p_inv = p.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].mul(&p_inv);
                for c in col..n {
                    let t = a[col][c].mul(&f);
                    a[r][c] = a[r][c].sub(&t);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<OperatorMatrix, AlgebraError> {
        let n = self.n;
        let mut a = self.rows();
        let mut inv = OperatorMatrix::identity(n).rows();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(AlgebraError::SingularMatrix)?;
            a.swap(piv, col);
            inv.swap(piv, col);
            let p_inv = a[col][col].inv().expect("nonzero pivot");
            for c in 0..n {
                a[col][c] = a[col][c].mul(&p_inv);
                inv[col][c] = inv[col][c].mul(&p_inv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..n {
                    let t = a[col][c].mul(&f);
                    a[r][c] = a[r][c].sub(&t);
                    let t = inv[col][c].mul(&f);
                    inv[r][c] = inv[r][c].sub(&t);
                }
            }
        }
        OperatorMatrix::from_rows(inv)
    }

    pub fn pow(&self, e: u32) -> OperatorMatrix {
        let mut acc = OperatorMatrix::identity(self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

pub fn collect_side_conditions<'a>(items: impl Iterator<Item = &'a RatFunc>) -> Vec<Polynomial> {
    let mut seen: BTreeMap<String, Polynomial> = BTreeMap::new();
    for r in items {
        if let Some(d) = r.side_condition() {
            seen.entry(d.to_string()).or_insert_with(|| d.clone());
        }
    }
    seen.into_values().collect()
}

impl fmt::Display for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}
