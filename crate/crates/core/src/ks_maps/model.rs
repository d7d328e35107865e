//! Matrix model of the level-`j` reduced Kodaira-Spencer-Mather map.
//!
//! Everything lives in `V = ⊕_b (C_b / f*m₀^{j+1}C_b)^p`, which is exact because each
//! ideal power contains a known power of the maximal ideal. Inside `V`:
//! * `E` is the image of `tf(θ_S)`,
//! * `L` is the image of `f*m₀ʲ θ_S(f)`,
//! * the target of the map is `(L + E) / E`, presented by the reductions of `L` modulo `E`.

use serde::Serialize;

use crate::algebra::{format_rational, monomials_of_degree, JetTruncation, Monomial, MonomialOrder, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::{GermAlgebra, MultiGerm, VectorFieldGerm};
use crate::polymodule::sparse::{Echelon, LinearSystem, RatRow};

/// Least `ℓ` over all branches with `m^ℓ ⊆ f*m₀C + m^{ℓ+1}`.
pub fn stable_order(alg: &GermAlgebra) -> u32 {
    alg.branches().iter().map(|b| b.ell()).max().unwrap_or(1)
}

/// Jet order `ℓ(i+2)+1`: at this order both the level-`i` and level-`i+1` quotients are resolved.
pub fn truncation_order(f: &MultiGerm, i: usize, cap: u32) -> Result<u32> {
    let alg = GermAlgebra::new(f, cap)?;
    Ok(stable_order(&alg) * (i as u32 + 2) + 1)
}

/// Rank data of one level, as reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KSLevel {
    pub i: usize,
    pub domain_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub ker_dim: usize,
    pub coker_dim: usize,
    pub surjective: bool,
    pub injective: bool,
}

#[derive(Clone, Debug)]
pub struct KSMapModel {
    level: usize,
    p: usize,
    domain: Vec<(Monomial, usize)>,
    target_dim: usize,
    /// One sparse row per target coordinate, indexed by domain column.
    matrix: Vec<RatRow>,
    columns: Vec<RatRow>,
    rank: usize,
    kernel: Vec<Vec<Rational>>,
    truncation_order: u32,
    offsets: Vec<usize>,
    ambient_dim: usize,
    tangent: Echelon,
    target_rref: Vec<RatRow>,
}

impl KSMapModel {
    pub fn build(alg: &mut GermAlgebra, germ: &MultiGerm, j: usize) -> Result<Self> {
        let p = germ.p();
        alg.ensure_power(j + 1);
        let mut offsets = Vec::new();
        let mut dim = 0;
        for b in alg.branches() {
            offsets.push(dim);
            dim += p * b.quotient_dim(j + 1);
        }
        let mut tangent = Echelon::new(dim);
        let mut level_vectors: Vec<RatRow> = Vec::new();
        for (bi, b) in alg.branches_mut().iter_mut().enumerate() {
            let a = b.quotient_dim(j + 1);
            let off = offsets[bi];
            let cutoff = b.cutoff(j + 1);
            let jac = b.jacobian().to_vec();
            let std: Vec<usize> = b.standard_columns(j + 1).to_vec();
            for s in &std {
                let unit = vec![(*s, crate::algebra::int(1))];
                for dm in &jac {
                    let mut v = Vec::new();
                    for (q, d) in dm.iter().enumerate() {
                        let prod = b.mul_row(&unit, d, cutoff);
                        v.extend(b.normal_form_row(j + 1, &prod).into_iter().map(|(c, x)| (off + q * a + c, x)));
                    }
                    tangent.insert_rat(&v);
                }
            }
            for g in b.level_basis(j)? {
                let nf = b.normal_form_row(j + 1, &g);
                for q in 0..p {
                    level_vectors.push(nf.iter().map(|(c, x)| (off + q * a + c, x.clone())).collect());
                }
            }
        }
        let mut target = Echelon::new(dim);
        for v in &level_vectors {
            let w = tangent.reduce_rat(v);
            target.insert_rat(&w);
        }
        let target_rref = target.rref();
        let target_dim = target_rref.len();

        let domain: Vec<(Monomial, usize)> = monomials_of_degree(p, j as u32, MonomialOrder::Grlex)
            .into_iter()
            .flat_map(|m| (0..p).map(move |q| (m.clone(), q)))
            .collect();
        let mut model = KSMapModel {
            level: j,
            p,
            domain: Vec::new(),
            target_dim,
            matrix: Vec::new(),
            columns: Vec::new(),
            rank: 0,
            kernel: Vec::new(),
            truncation_order: alg.branches().iter().map(|b| b.cutoff(j + 1)).max().unwrap_or(0),
            offsets,
            ambient_dim: dim,
            tangent,
            target_rref,
        };
        // ωf(X^β ∂/∂X_q) = (f^β) e_q on every branch.
        let mut pulled: Vec<Vec<RatRow>> = vec![Vec::new(); alg.branch_count()];
        let betas = monomials_of_degree(p, j as u32, MonomialOrder::Grlex);
        for (bi, (b, br)) in alg.branches_mut().iter_mut().zip(germ.branches()).enumerate() {
            let cutoff = b.cutoff(j + 1);
            for beta in &betas {
                let mono = Polynomial::monomial(beta.clone(), crate::algebra::int(1));
                let comp = mono.substitute(br.components(), Some(JetTruncation::new(cutoff)))?;
                pulled[bi].push(b.normal_form(j + 1, &comp));
            }
        }
        let mut columns = Vec::with_capacity(domain.len());
        for (k, (_, q)) in domain.iter().enumerate() {
            let beta_idx = k / p;
            let mut v = Vec::new();
            for (bi, b) in alg.branches().iter().enumerate() {
                let a = b.quotient_dim(j + 1);
                let off = model.offsets[bi];
                v.extend(pulled[bi][beta_idx].iter().map(|(c, x)| (off + q * a + c, x.clone())));
            }
            columns.push(model.coordinates(&v)?);
        }
        let mut rows: Vec<RatRow> = vec![Vec::new(); target_dim];
        for (k, col) in columns.iter().enumerate() {
            for (r, x) in col {
                rows[*r].push((k, x.clone()));
            }
        }
        let mut ech = Echelon::new(domain.len());
        for r in &rows {
            ech.insert_rat(r);
        }
        model.rank = ech.rank();
        model.kernel = ech.kernel_basis();
        model.matrix = rows;
        model.columns = columns;
        model.domain = domain;
        Ok(model)
    }

    /// Target coordinates of a vector of `V` lying in `L + E`.
    pub fn coordinates(&self, v: &RatRow) -> Result<RatRow> {
        let mut w: std::collections::BTreeMap<usize, Rational> = self.tangent.reduce_rat(v).into_iter().collect();
        let mut out = Vec::new();
        for (k, row) in self.target_rref.iter().enumerate() {
            let pivot = row[0].0;
            let Some(c) = w.get(&pivot).cloned() else { continue };
            for (col, x) in row {
                let e = w.entry(*col).or_insert_with(|| crate::algebra::int(0));
                *e -= &c * x;
                if num_traits::Zero::is_zero(e) {
                    w.remove(col);
                }
            }
            out.push((k, c));
        }
        if !w.is_empty() {
            return Err(Error::Consistency(format!(
                "level {}: vector does not lie in f*m₀ʲθ + tf(θ) modulo the next power",
                self.level
            )));
        }
        Ok(out)
    }

    /// Embeds per-branch `p`-tuples into `V`.
    pub fn embed(&self, alg: &mut GermAlgebra, per_branch: &[Vec<Polynomial>]) -> RatRow {
        let j = self.level;
        let mut v = Vec::new();
        for (bi, (b, comps)) in alg.branches_mut().iter_mut().zip(per_branch).enumerate() {
            let a = b.quotient_dim(j + 1);
            let off = self.offsets[bi];
            for (q, c) in comps.iter().enumerate() {
                v.extend(b.normal_form(j + 1, c).into_iter().map(|(k, x)| (off + q * a + k, x)));
            }
        }
        v.sort_by_key(|(c, _)| *c);
        v
    }

    /// Whether a vector of `V` lies in `E`, i.e. is tangent modulo the next ideal power.
    pub fn is_tangent(&self, v: &RatRow) -> bool {
        self.tangent.contains_rat(v)
    }

    /// A homogeneous degree-`j` field mapping onto the given target coordinates, if one exists.
    pub fn preimage(&self, coords: &RatRow) -> Option<VectorFieldGerm> {
        let mut sys = LinearSystem::new(self.domain.len());
        let mut rhs = vec![crate::algebra::int(0); self.target_dim];
        for (k, x) in coords {
            rhs[*k] = x.clone();
        }
        for (r, row) in self.matrix.iter().enumerate() {
            if !sys.add_equation(row, &rhs[r]) {
                return None;
            }
        }
        sys.solution().map(|x| self.field_from_coefficients(&x))
    }

    pub fn field_from_coefficients(&self, x: &[Rational]) -> VectorFieldGerm {
        let mut comps = vec![Polynomial::zero(self.p); self.p];
        for ((m, q), c) in self.domain.iter().zip(x) {
            comps[*q].add_term(m.clone(), c.clone());
        }
        VectorFieldGerm::new(comps).expect("p components in p variables")
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn domain_basis(&self) -> &[(Monomial, usize)] {
        &self.domain
    }

    pub fn domain_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn is_surjective(&self) -> bool {
        self.rank == self.target_dim
    }

    pub fn is_injective(&self) -> bool {
        self.kernel.is_empty()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Kernel basis as homogeneous target fields.
    pub fn kernel_fields(&self) -> Vec<VectorFieldGerm> {
        self.kernel.iter().map(|x| self.field_from_coefficients(x)).collect()
    }

    /// Column `k`: target coordinates of the image of the `k`-th domain basis field.
    pub fn column(&self, k: usize) -> &RatRow {
        &self.columns[k]
    }

    /// Dense matrix as rational strings, rows indexed by target coordinate.
    pub fn matrix_strings(&self) -> Vec<Vec<String>> {
        self.matrix
            .iter()
            .map(|row| {
                let mut dense = vec!["0".to_string(); self.domain.len()];
                for (c, x) in row {
                    dense[*c] = format_rational(x);
                }
                dense
            })
            .collect()
    }

    pub fn summary(&self) -> KSLevel {
        KSLevel {
            i: self.level,
            domain_dim: self.domain.len(),
            target_dim: self.target_dim,
            rank: self.rank,
            ker_dim: self.kernel.len(),
            coker_dim: self.target_dim - self.rank,
            surjective: self.is_surjective(),
            injective: self.is_injective(),
        }
    }
}
