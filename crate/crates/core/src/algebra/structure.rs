use std::collections::{BTreeMap, BTreeSet};

use super::matrix::{collect_side_conditions, vec_is_zero, zero_vec, OperatorMatrix, Vector};
use crate::error::AlgebraError;
use crate::scalar::poly::Var;
use crate::scalar::{FieldDescriptor, FieldElement, Polynomial, RatFunc};

/// Structure constants of an `arity`-linear bracket, stored sparsely.
///
/// Keys are 0-based argument tuples; absent keys mean the zero vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure<const A: usize> {
    pub name: String,
    dim: usize,
    field: FieldDescriptor,
    params: Vec<String>,
    constants: BTreeMap<[usize; A], Vector>,
}

/// Trilinear bracket `⟦e_i, e_j, e_k⟧ = Σ_p χ^p_{ijk} e_p`.
pub type TernaryStructure = Structure<3>;
/// Bilinear bracket `[e_i, e_j] = Σ_p c^p_{ij} e_p`.
pub type BinaryStructure = Structure<2>;

impl<const A: usize> Structure<A> {
    pub fn new(name: impl Into<String>, dim: usize, field: FieldDescriptor, params: Vec<String>) -> Self {
        Structure { name: name.into(), dim, field, params, constants: BTreeMap::new() }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new("zero", dim, FieldDescriptor::rationals(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn set_field(&mut self, field: FieldDescriptor) {
        self.field = field;
    }

    pub fn set_params(&mut self, params: Vec<String>) {
        self.params = params;
    }

    /// Sets the image of a basis tuple (0-based); a zero vector removes it.
    pub fn set(&mut self, args: [usize; A], out: Vector) -> Result<(), AlgebraError> {
        for &a in &args {
            if a >= self.dim {
                return Err(AlgebraError::IndexOutOfRange { index: a + 1, dim: self.dim });
            }
        }
        if out.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: out.len() });
        }
        if vec_is_zero(&out) {
            self.constants.remove(&args);
        } else {
            self.constants.insert(args, out);
        }
        Ok(())
    }

    /// Builder form of [`Structure::set`] with 1-based indices and `(p, coefficient)` outputs.
    pub fn with(mut self, args: [usize; A], out: &[(usize, RatFunc)]) -> Self {
        let mut v = zero_vec(self.dim);
        for (p, c) in out {
            v[p - 1] = v[p - 1].add(c);
        }
        let args = args.map(|a| a - 1);
        self.set(args, v).expect("valid indices");
        self
    }

    pub fn get(&self, args: &[usize; A]) -> Option<&Vector> {
        self.constants.get(args)
    }

    pub fn basis_bracket(&self, args: &[usize; A]) -> Vector {
        self.constants.get(args).cloned().unwrap_or_else(|| zero_vec(self.dim))
    }

    /// Nonzero constants in index order.
    pub fn constants(&self) -> impl Iterator<Item = (&[usize; A], &Vector)> {
        self.constants.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.constants.is_empty()
    }

    /// Multilinear evaluation `Σ x_i y_j … χ_{ij…}`.
    pub fn bracket(&self, args: [&[RatFunc]; A]) -> Vector {
        let mut out = zero_vec(self.dim);
        'tuple: for (idx, image) in &self.constants {
            let mut coeff = RatFunc::one();
            for slot in 0..A {
                let x = &args[slot][idx[slot]];
                if x.is_zero() {
                    continue 'tuple;
                }
                if !x.is_one() {
                    coeff = coeff.mul(x);
                }
            }
            for (p, c) in image.iter().enumerate() {
                if !c.is_zero() {
                    out[p] = out[p].add(&c.mul(&coeff));
                }
            }
        }
        out
    }

    pub fn check_vectors(&self, args: &[&[RatFunc]]) -> Result<(), AlgebraError> {
        for v in args {
            if v.len() != self.dim {
                return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        Ok(())
    }

    /// Free variables occurring in the constants.
    pub fn variables(&self) -> BTreeSet<Var> {
        self.constants.values().flatten().flat_map(RatFunc::variables).collect()
    }

    pub fn require_constant(&self) -> Result<(), AlgebraError> {
        let vars = self.variables();
        if vars.is_empty() {
            Ok(())
        } else {
            Err(AlgebraError::ParametricAlgebra(vars.iter().map(|v| v.to_string()).collect()))
        }
    }

    pub fn side_conditions(&self) -> Vec<Polynomial> {
        collect_side_conditions(self.constants.values().flatten())
    }

    /// Substitutes values for parameters; substituted names leave the parameter list.
    pub fn instantiate(&self, values: &BTreeMap<String, FieldElement>) -> Result<Self, AlgebraError> {
        let mut out = Structure::new(self.name.clone(), self.dim, self.field.clone(), Vec::new());
        out.params = self.params.iter().filter(|p| !values.contains_key(*p)).cloned().collect();
        for (idx, v) in &self.constants {
            let w = v.iter().map(|c| c.substitute_partial(values)).collect::<Result<Vec<_>, _>>()?;
            out.set(*idx, w)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: &RatFunc) -> Self {
        let mut out = Structure::new(self.name.clone(), self.dim, self.field.clone(), self.params.clone());
        for (idx, v) in &self.constants {
            out.set(*idx, v.iter().map(|c| c.mul(k)).collect()).expect("same shape");
        }
        out
    }

    /// Transports the bracket through the basis change `e'_i = P e_i`.
    pub fn change_basis(&self, p: &OperatorMatrix) -> Result<Self, AlgebraError> {
        if p.dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        let p_inv = p.inverse()?;
        let cols: Vec<Vector> = (0..self.dim).map(|c| p.column(c)).collect();
        let mut out = Structure::new(self.name.clone(), self.dim, self.field.clone(), self.params.clone());
        for idx in all_tuples::<A>(self.dim) {
            let args: [&[RatFunc]; A] = std::array::from_fn(|s| cols[idx[s]].as_slice());
            let image = p_inv.apply(&self.bracket(args));
            out.set(idx, image)?;
        }
        Ok(out)
    }
}

/// All index tuples of length `A` over `0..n` in lexicographic order.
pub fn all_tuples<const A: usize>(n: usize) -> impl Iterator<Item = [usize; A]> {
    let total = n.pow(A as u32);
    (0..total).map(move |mut k| {
        let mut t = [0usize; A];
        for slot in (0..A).rev() {
            t[slot] = k % n;
            k /= n;
        }
        t
    })
}

/// Unit vectors `e_0 … e_{n-1}`.
pub fn basis(n: usize) -> Vec<Vector> {
    (0..n).map(|i| super::matrix::unit_vec(n, i)).collect()
}

/// Joins fields and parameter lists of two structures for a combined result.
pub(crate) fn merged_context<const A: usize>(
    a: &Structure<A>,
    b: &Structure<A>,
) -> Result<(FieldDescriptor, Vec<String>), AlgebraError> {
    if a.dim != b.dim {
        return Err(AlgebraError::DimensionMismatch { expected: a.dim, got: b.dim });
    }
    let field = a.field.join(&b.field)?;
    let mut params = a.params.clone();
    for p in &b.params {
        if !params.contains(p) {
            params.push(p.clone());
        }
    }
    Ok((field, params))
}

/// `k1·T1 + k2·T2`.
pub fn pencil<const A: usize>(
    t1: &Structure<A>,
    t2: &Structure<A>,
    k1: &RatFunc,
    k2: &RatFunc,
) -> Result<Structure<A>, AlgebraError> {
    let (field, mut params) = merged_context(t1, t2)?;
    for v in k1.variables().into_iter().chain(k2.variables()) {
        if !params.iter().any(|p| **p == *v) {
            params.push(v.to_string());
        }
    }
    let mut out = Structure::new(format!("{}+{}", t1.name, t2.name), t1.dim, field, params);
    for idx in all_tuples::<A>(t1.dim) {
        let a = t1.basis_bracket(&idx);
        let b = t2.basis_bracket(&idx);
        let v: Vector = a.iter().zip(&b).map(|(x, y)| x.mul(k1).add(&y.mul(k2))).collect();
        out.set(idx, v)?;
    }
    Ok(out)
}
