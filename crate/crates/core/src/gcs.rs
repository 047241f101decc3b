//! Generalized complex structures presented by a pure spinor and the
//! frames of its annihilator `E` and of `conj(E)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::coeffs::{Chart, GaussianRational, RationalFn};
use crate::error::{Error, Result};
use crate::forms::{wedge_sign, Form};
use crate::gtangent::GVector;
use crate::linalg::{eval_matrix, zeros, Matrix};
use crate::poismod::PoissonBivector;

/// Where a structure came from; enables the closed-form Dolbeault checks.
#[derive(Clone, Debug)]
pub enum StructureKind {
    Complex,
    Symplectic { omega: Form },
    Poisson { sigma: PoissonBivector },
    Spinor,
}

#[derive(Debug)]
pub struct GCStructure {
    chart: Chart,
    kind: StructureKind,
    rho: Form,
    e_frame: Vec<GVector>,
    ebar_frame: Vec<GVector>,
    gram: Matrix<RationalFn>,
    gram_inv: Matrix<RationalFn>,
    dual_ebar: Vec<GVector>,
    ubasis: OnceLock<Result<UBasis>>,
    structure_constants: OnceLock<Result<Vec<Vec<Vec<RationalFn>>>>>,
}

#[derive(Debug)]
struct UBasis {
    subsets: Vec<u32>,
    inverse: Matrix<RationalFn>,
}

/// Matrix of the linear map `v -> v . rho` in the coordinates of
/// [`GVector::coords`] (columns) and basis forms (rows).
pub fn clifford_matrix(rho: &Form) -> Matrix<RationalFn> {
    let chart = rho.chart();
    let n = chart.nvars();
    let mut m = zeros(chart, 1 << n, 2 * n);
    for k in 0..2 * n {
        let b = if k < n { GVector::coord(chart, k) } else { GVector::coform(chart, k - n) };
        for (mask, c) in b.clifford(rho).terms() {
            m[(mask as usize, k)] = c.clone();
        }
    }
    m
}

fn form_coords(a: &Form) -> Vec<RationalFn> {
    let chart = a.chart();
    let mut v = vec![RationalFn::zero(chart); 1 << chart.nvars()];
    for (m, c) in a.terms() {
        v[m as usize] = c.clone();
    }
    v
}

fn form_from_coords(chart: Chart, v: &[RationalFn]) -> Form {
    Form::from_terms(chart, v.iter().enumerate().map(|(m, c)| (m as u32, c.clone())))
}

fn gram_of(chart: Chart, e: &[GVector], f: &[GVector]) -> Matrix<RationalFn> {
    let mut g = zeros(chart, e.len(), f.len());
    for (i, a) in e.iter().enumerate() {
        for (j, b) in f.iter().enumerate() {
            g[(i, j)] = a.inner(b).scale(&GaussianRational::from_int(2));
        }
    }
    g
}

impl GCStructure {
    /// Builds a structure from explicit frames, verifying annihilation,
    /// isotropy and invertibility of the pairing.
    fn build(kind: StructureKind, rho: Form, e_frame: Vec<GVector>) -> Result<Self> {
        let chart = rho.chart();
        for (i, e) in e_frame.iter().enumerate() {
            if !e.clifford(&rho).is_zero() {
                return Err(Error::ImpureSpinor(format!("frame element {} does not annihilate the spinor", i + 1)));
            }
        }
        let iso = gram_of(chart, &e_frame, &e_frame);
        if !iso.is_zero() {
            return Err(Error::Precondition("frame is not isotropic".into()));
        }
        Self::assemble(kind, rho, e_frame)
    }

    fn assemble(kind: StructureKind, rho: Form, e_frame: Vec<GVector>) -> Result<Self> {
        let chart = rho.chart();
        if e_frame.len() != chart.nvars() {
            return Err(Error::ImpureSpinor(format!(
                "annihilator has rank {}, expected {}",
                e_frame.len(),
                chart.nvars()
            )));
        }
        let ebar_frame: Vec<GVector> = e_frame.iter().map(GVector::conjugate).collect();
        let gram = gram_of(chart, &e_frame, &ebar_frame);
        let gram_inv =
            gram.inverse().ok_or_else(|| Error::SingularFrame("pairing between E and conj(E) is degenerate".into()))?;
        let dual_ebar = (0..e_frame.len())
            .map(|a| {
                let mut acc = GVector::zero(chart);
                for (j, eb) in ebar_frame.iter().enumerate() {
                    let c = &gram_inv[(j, a)];
                    if !c.is_zero() {
                        acc = &acc + &eb.scale(c);
                    }
                }
                acc
            })
            .collect();
        Ok(GCStructure {
            chart,
            kind,
            rho,
            e_frame,
            ebar_frame,
            gram,
            gram_inv,
            dual_ebar,
            ubasis: OnceLock::new(),
            structure_constants: OnceLock::new(),
        })
    }

    /// The complex structure of `C^m`: `rho = dz1 ^ ... ^ dzm`,
    /// `E = span(d/dzb_i, dz_i)`.
    pub fn from_complex(m: usize) -> Result<Self> {
        let chart = Chart::new(m);
        let rho = Form::basis((1u32 << m) - 1, RationalFn::one(chart));
        let mut e: Vec<GVector> = (0..m).map(|i| GVector::coord(chart, m + i)).collect();
        e.extend((0..m).map(|i| GVector::coform(chart, i)));
        Self::build(StructureKind::Complex, rho, e)
    }

    /// The structure of a constant real symplectic form: `rho = exp(i w)`,
    /// `E = span(X - i i_X w)`.
    pub fn from_symplectic(omega: &Form) -> Result<Self> {
        let chart = omega.chart();
        if omega.degree() != Some(2) {
            return Err(Error::DegenerateOmega("expected a nonzero two-form".into()));
        }
        if omega.constant_coeffs().is_none() {
            return Err(Error::DegenerateOmega("coefficients must be constant".into()));
        }
        if omega.conjugate() != *omega {
            return Err(Error::DegenerateOmega("form is not real".into()));
        }
        if omega.pow(chart.complex_dim() as u32).is_zero() {
            return Err(Error::DegenerateOmega("top power vanishes".into()));
        }
        let i = GaussianRational::i();
        let rho = omega.scale_c(&i).exp();
        let e = (0..chart.nvars())
            .map(|g| {
                let x = GVector::coord(chart, g);
                let xi = omega.interior(x.vec()).scale_c(&-&i);
                &x + &GVector::from_form(xi).expect("contraction of a two-form is a one-form")
            })
            .collect();
        Self::build(StructureKind::Symplectic { omega: omega.clone() }, rho, e)
    }

    /// The standard symplectic form `(i/2) sum dz_k ^ dzb_k` on `C^m`.
    pub fn standard_omega(m: usize) -> Form {
        let chart = Chart::new(m);
        let half_i = &GaussianRational::i() * &GaussianRational::from_ratio(1, 2);
        let mut w = Form::zero(chart);
        for k in 0..m {
            w = &w + &Form::gen(chart, k).wedge(&Form::gen(chart, m + k)).scale_c(&half_i);
        }
        w
    }

    /// The structure of a holomorphic Poisson bivector:
    /// `rho = exp(i_sigma)(dz1 ^ ... ^ dzn)`,
    /// `E = span(d/dzb_i, sigma(dz_i) + dz_i)`.
    pub fn from_poisson(sigma: &PoissonBivector) -> Result<Self> {
        crate::poismod::jacobi_check(sigma, 1)?;
        let chart = sigma.chart();
        let n = chart.n;
        let rho = sigma.spinor();
        let mut e: Vec<GVector> = (0..n).map(|i| GVector::coord(chart, n + i)).collect();
        for i in 0..n {
            let dz = Form::gen(chart, i);
            let v = GVector::from_vector(chart, sigma.apply(&dz));
            e.push(&v + &GVector::coform(chart, i));
        }
        Self::build(StructureKind::Poisson { sigma: sigma.clone() }, rho, e)
    }

    /// A structure from a spinor alone; `E` is computed as the Clifford
    /// annihilator over the field of rational functions.
    pub fn from_spinor(rho: &Form) -> Result<Self> {
        if rho.is_zero() {
            return Err(Error::ImpureSpinor("zero spinor".into()));
        }
        let chart = rho.chart();
        let ns = clifford_matrix(rho).nullspace();
        let e: Vec<GVector> = ns.iter().map(|c| GVector::from_coords(chart, c)).collect();
        if e.len() != chart.nvars() {
            return Err(Error::ImpureSpinor(format!(
                "generic annihilator has rank {}, expected {}",
                e.len(),
                chart.nvars()
            )));
        }
        Self::build(StructureKind::Spinor, rho.clone(), e)
    }

    /// A structure from a spinor and a caller-supplied frame, without
    /// checking that the frame annihilates the spinor. The integrability
    /// check detects any mismatch.
    pub fn unchecked(rho: Form, e_frame: Vec<GVector>) -> Result<Self> {
        Self::assemble(StructureKind::Spinor, rho, e_frame)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Complex dimension `m` of the underlying space.
    pub fn m(&self) -> usize {
        self.chart.complex_dim()
    }

    pub fn kind(&self) -> &StructureKind {
        &self.kind
    }

    pub fn rho(&self) -> &Form {
        &self.rho
    }

    pub fn e_frame(&self) -> &[GVector] {
        &self.e_frame
    }

    pub fn ebar_frame(&self) -> &[GVector] {
        &self.ebar_frame
    }

    /// `2 (e_i, ebar_j)`.
    pub fn gram(&self) -> &Matrix<RationalFn> {
        &self.gram
    }

    /// Sections `f_a` of `conj(E)` dual to the `E`-frame:
    /// `2 (e_b, f_a) = delta_ab`.
    pub fn dual_ebar(&self) -> &[GVector] {
        &self.dual_ebar
    }

    /// Tautological section: the degree-0 coefficient of `rho`.
    pub fn tau(&self) -> RationalFn {
        self.rho.coeff(0)
    }

    /// Lowest degree in which `rho` does not vanish at the point.
    pub fn type_at(&self, point: &[GaussianRational]) -> Result<u32> {
        let at = self.rho.at_point(point)?;
        at.terms()
            .map(|(m, _)| m.count_ones())
            .min()
            .ok_or_else(|| Error::ImpureSpinor("spinor vanishes at the point".into()))
    }

    /// Solves `d rho = v . rho` and cross-checks that the Courant brackets
    /// of the `E`-frame annihilate `rho`.
    pub fn check_integrable(&self) -> Result<GVector> {
        for (i, e) in self.e_frame.iter().enumerate() {
            if !e.clifford(&self.rho).is_zero() {
                return Err(Error::NoWitness(format!("frame element {} does not annihilate the spinor", i + 1)));
            }
        }
        for i in 0..self.e_frame.len() {
            for j in i + 1..self.e_frame.len() {
                let b = self.e_frame[i].courant(&self.e_frame[j]);
                if !b.clifford(&self.rho).is_zero() {
                    return Err(Error::NoWitness(format!(
                        "bracket of frame elements {} and {} leaves E",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        integrability_witness(&self.rho)
    }

    /// Ē-component of `v` in the `f_a` basis, with the check that `v` has
    /// no `E`-component.
    pub fn ebar_coords(&self, v: &GVector) -> Result<Vec<RationalFn>> {
        let alpha: Vec<RationalFn> =
            self.e_frame.iter().map(|e| e.inner(v).scale(&GaussianRational::from_int(2))).collect();
        let rebuilt = self.combine_dual(&alpha);
        if rebuilt != *v {
            return Err(Error::NotInEbar(v.to_string()));
        }
        Ok(alpha)
    }

    fn combine_dual(&self, alpha: &[RationalFn]) -> GVector {
        let mut acc = GVector::zero(self.chart);
        for (a, c) in alpha.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &self.dual_ebar[a].scale(c);
            }
        }
        acc
    }

    /// Projection of `v` to `conj(E)` along `E`.
    pub fn project_ebar(&self, v: &GVector) -> GVector {
        let alpha: Vec<RationalFn> =
            self.e_frame.iter().map(|e| e.inner(v).scale(&GaussianRational::from_int(2))).collect();
        self.combine_dual(&alpha)
    }

    /// Projection of `v` to `E` along `conj(E)`.
    pub fn project_e(&self, v: &GVector) -> GVector {
        v - &self.project_ebar(v)
    }

    /// `dbar_J f`: the `conj(E)` component of `df`.
    pub fn dolbeault_function(&self, f: &RationalFn) -> GVector {
        let df = Form::scalar(f.clone()).ext_d();
        self.project_ebar(&GVector::from_form(df).expect("df is a one-form"))
    }

    /// Closed-form `dbar_J f` for the standard structures:
    /// `dbar f` (complex), `dbar f - sigma(del f) + conj(sigma)(dbar f)`
    /// (Poisson) and `(i X_f + df) / 2` with `i_{X_f} w = -df`
    /// (symplectic). `None` for structures given only by a spinor.
    pub fn dolbeault_closed_form(&self, f: &RationalFn) -> Option<GVector> {
        let chart = self.chart;
        let fr = Form::scalar(f.clone());
        match &self.kind {
            StructureKind::Complex => Some(GVector::from_form(fr.dbar_part()).unwrap()),
            StructureKind::Poisson { sigma } => {
                let del = fr.del_part();
                let dbar = fr.dbar_part();
                let a = sigma.apply(&del);
                let b = sigma.apply_conjugate(&dbar);
                let vec = a.iter().zip(&b).map(|(x, y)| y - x).collect();
                Some(GVector::new(vec, dbar).unwrap())
            }
            StructureKind::Symplectic { omega } => {
                let df = fr.ext_d();
                let x = symplectic_hamiltonian(omega, &df)?;
                let half = GaussianRational::from_ratio(1, 2);
                let ix = GVector::from_vector(chart, x).scale_c(&GaussianRational::i());
                Some((&ix + &GVector::from_form(df).unwrap()).scale_c(&half))
            }
            StructureKind::Spinor => None,
        }
    }

    fn ubasis(&self) -> Result<&UBasis> {
        self.ubasis
            .get_or_init(|| {
                let cols = self.ubasis_columns(&self.rho, &self.ebar_frame);
                let subsets = ubasis_subsets(self.ebar_frame.len());
                let chart = self.chart;
                let mut c = zeros(chart, 1 << chart.nvars(), subsets.len());
                for (j, col) in cols.iter().enumerate() {
                    for (i, x) in col.iter().enumerate() {
                        c[(i, j)] = x.clone();
                    }
                }
                let inverse =
                    c.inverse().ok_or_else(|| Error::SingularFrame("U_k change of basis is singular".into()))?;
                Ok(UBasis { subsets, inverse })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn ubasis_columns(&self, rho: &Form, ebar: &[GVector]) -> Vec<Vec<RationalFn>> {
        ubasis_subsets(ebar.len())
            .iter()
            .map(|&s| {
                let mut f = rho.clone();
                for k in (0..ebar.len()).rev() {
                    if s >> k & 1 == 1 {
                        f = ebar[k].clifford(&f);
                    }
                }
                form_coords(&f)
            })
            .collect()
    }

    /// Decomposes a form into its `U_k` components,
    /// `U_{m-p} = span(ebar_I . rho, |I| = p)`.
    pub fn uk_decompose(&self, a: &Form) -> Result<UkDecomposition> {
        let ub = self.ubasis()?;
        let x = ub.inverse.mul_vec(&form_coords(a));
        let m = self.m() as i32;
        let chart = self.chart;
        let ebar_products = self.ubasis_columns(&self.rho, &self.ebar_frame);
        let mut parts = vec![Form::zero(chart); (2 * m + 1) as usize];
        for (j, &s) in ub.subsets.iter().enumerate() {
            if x[j].is_zero() {
                continue;
            }
            let k = m - s.count_ones() as i32;
            let col = form_from_coords(chart, &ebar_products[j]).scale(&x[j]);
            let slot = &mut parts[(k + m) as usize];
            *slot = &*slot + &col;
        }
        Ok(UkDecomposition { m: m as usize, parts })
    }

    /// `U_k` decomposition with every coefficient evaluated at `point`.
    pub fn uk_decompose_at(&self, a: &Form, point: &[GaussianRational]) -> Result<PointUk> {
        let rho = self.rho.at_point(point)?;
        let ebar = self.ebar_frame.iter().map(|e| e.at_point(point)).collect::<Result<Vec<_>>>()?;
        let cols = self.ubasis_columns(&rho, &ebar);
        let subsets = ubasis_subsets(ebar.len());
        let chart = self.chart;
        let mut c = zeros(chart, 1 << chart.nvars(), subsets.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                c[(i, j)] = x.clone();
            }
        }
        let c = eval_matrix(&c, point)?;
        let rhs: Vec<GaussianRational> = form_coords(&a.at_point(point)?)
            .iter()
            .map(|x| x.constant_value().expect("evaluated coefficient"))
            .collect();
        let x = c
            .solve(&rhs)
            .filter(|_| c.rank() == subsets.len())
            .ok_or_else(|| Error::SingularFrame("U_k change of basis is singular at the point".into()))?;
        let m = self.m() as i32;
        let mut levels = vec![false; (2 * m + 1) as usize];
        for (j, &s) in subsets.iter().enumerate() {
            if !x[j].is_zero() {
                levels[(m - s.count_ones() as i32 + m) as usize] = true;
            }
        }
        Ok(PointUk { m: m as usize, nonzero: levels })
    }

    /// The spinorial action of `J`: multiplication by `i k` on `U_k`.
    pub fn j_action(&self, a: &Form) -> Result<Form> {
        let dec = self.uk_decompose(a)?;
        let mut out = Form::zero(self.chart);
        for k in -(self.m() as i32)..=self.m() as i32 {
            let c = &GaussianRational::i() * &GaussianRational::from_int(k as i64);
            out = &out + &dec.level(k).scale_c(&c);
        }
        Ok(out)
    }

    /// Splits `da` for `a` in a single level `U_k` into its `U_{k-1}` and
    /// `U_{k+1}` parts.
    pub fn decompose_d(&self, a: &Form) -> Result<(Form, Form)> {
        let dec = self.uk_decompose(a)?;
        let k = match dec.concentrated_in() {
            Some(k) => k,
            None if a.is_zero() => return Ok((Form::zero(self.chart), Form::zero(self.chart))),
            None => return Err(Error::UInconsistent("input is not concentrated in a single U_k".into())),
        };
        let dd = self.uk_decompose(&a.ext_d())?;
        for j in dec.levels() {
            if j != k - 1 && j != k + 1 && !dd.level(j).is_zero() {
                return Err(Error::UInconsistent(format!("d of a U_{k} section has a U_{j} component")));
            }
        }
        Ok((dd.level(k - 1), dd.level(k + 1)))
    }

    /// The complex structure `J` on `(T + T*)` at a point, as a matrix in
    /// [`GVector::coords`] coordinates: `+i` on `E`, `-i` on `conj(E)`.
    pub fn j_matrix_at(&self, point: &[GaussianRational]) -> Result<Matrix<GaussianRational>> {
        let chart = self.chart;
        let n = chart.nvars();
        let e = self.e_frame.iter().map(|v| v.at_point(point)).collect::<Result<Vec<_>>>()?;
        let eb = self.ebar_frame.iter().map(|v| v.at_point(point)).collect::<Result<Vec<_>>>()?;
        // Columns: frame vectors; J acts as diag(i, -i) in the frame basis.
        let mut f = zeros(chart, 2 * n, 2 * n);
        for (j, v) in e.iter().chain(eb.iter()).enumerate() {
            for (i, c) in v.coords().into_iter().enumerate() {
                f[(i, j)] = c;
            }
        }
        let f = eval_matrix(&f, point)?;
        let finv = f.inverse().ok_or_else(|| Error::SingularFrame("E + conj(E) does not span at the point".into()))?;
        let mut d = Matrix::filled(2 * n, 2 * n, GaussianRational::zero());
        for j in 0..2 * n {
            d[(j, j)] = if j < n { GaussianRational::i() } else { -GaussianRational::i() };
        }
        Ok(f.mul(&d).mul(&finv))
    }

    /// Decides whether the linear subspace spanned by `tangent` (constant
    /// real tangent vectors) through `point` is a generalized complex
    /// submanifold, in two independent ways.
    pub fn submanifold_check(&self, tangent: &[GVector], point: &[GaussianRational]) -> Result<SubmanifoldVerdict> {
        let chart = self.chart;
        let n = chart.nvars();
        let zero = GaussianRational::zero();
        let tan: Vec<Vec<GaussianRational>> = tangent
            .iter()
            .map(|v| {
                if !v.form().is_zero() {
                    return Err(Error::Precondition("tangent vectors must have no form part".into()));
                }
                v.vec().iter().map(|c| c.eval(point)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let tan_rank = if tan.is_empty() { 0 } else { Matrix::from_rows(tan.clone()).rank() };
        // Conormal forms: xi with xi(v) = 0 for every tangent v.
        let conormal: Vec<Vec<GaussianRational>> = if tan.is_empty() {
            (0..n)
                .map(|g| (0..n).map(|h| if g == h { GaussianRational::one() } else { zero.clone() }).collect())
                .collect()
        } else {
            Matrix::from_rows(tan.clone()).nullspace()
        };
        // (a) J-invariance of TY + N*Y.
        let mut span: Vec<Vec<GaussianRational>> = Vec::new();
        for t in &tan {
            let mut c = t.clone();
            c.extend(std::iter::repeat_n(zero.clone(), n));
            span.push(c);
        }
        for xi in &conormal {
            let mut c = vec![zero.clone(); n];
            c.extend(xi.iter().cloned());
            span.push(c);
        }
        let j = self.j_matrix_at(point)?;
        let l = Matrix::from_rows(span.clone());
        let base_rank = l.rank();
        let mut extended = span.clone();
        for v in &span {
            extended.push(j.mul_vec(v));
        }
        let via_j = Matrix::from_rows(extended).rank() == base_rank;
        debug_assert_eq!(base_rank, tan_rank + conormal.len());
        // (b) The generator of the top power of N*Y lies in U_0.
        let mut nu = Form::one(chart);
        for xi in &conormal {
            let f = Form::from_terms(
                chart,
                xi.iter().enumerate().map(|(g, c)| (1u32 << g, RationalFn::constant(chart, c.clone()))),
            );
            nu = nu.wedge(&f);
        }
        let via_uk = self.uk_decompose_at(&nu, point)?.concentrated_in() == Some(0);
        if via_j != via_uk {
            return Err(Error::UInconsistent(format!(
                "J-invariance ({via_j}) and the U_0 criterion ({via_uk}) disagree"
            )));
        }
        Ok(SubmanifoldVerdict { generalized_complex: via_j, via_j, via_uk })
    }

    /// Checks that every point of the current is a generalized complex
    /// submanifold, i.e. that the current lies in `U_0`.
    pub fn point_current_u0(&self, t: &PointCurrent) -> Result<PointCurrentVerdict> {
        let per_point = t
            .points()
            .iter()
            .map(|p| self.submanifold_check(&[], p).map(|v| v.generalized_complex))
            .collect::<Result<Vec<_>>>()?;
        Ok(PointCurrentVerdict { in_u0: per_point.iter().all(|&b| b), per_point })
    }

    fn structure_constants(&self) -> Result<&Vec<Vec<Vec<RationalFn>>>> {
        self.structure_constants
            .get_or_init(|| {
                let r = self.e_frame.len();
                let two = GaussianRational::from_int(2);
                let mut c = vec![vec![vec![RationalFn::zero(self.chart); r]; r]; r];
                for i in 0..r {
                    for j in i + 1..r {
                        let b = self.e_frame[i].courant(&self.e_frame[j]);
                        if self.e_frame.iter().any(|e| !e.inner(&b).is_zero()) {
                            return Err(Error::NonIntegrable(format!(
                                "bracket of frame elements {} and {} leaves E",
                                i + 1,
                                j + 1
                            )));
                        }
                        let p: Vec<RationalFn> = self.ebar_frame.iter().map(|eb| b.inner(eb).scale(&two)).collect();
                        for k in 0..r {
                            let mut acc = RationalFn::zero(self.chart);
                            for (l, pl) in p.iter().enumerate() {
                                if !pl.is_zero() {
                                    acc = &acc + &(pl * &self.gram_inv[(l, k)]);
                                }
                            }
                            c[i][j][k] = acc.clone();
                            c[j][i][k] = -acc;
                        }
                    }
                }
                Ok(c)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Identifies a `conj(E)` section with a Λ¹ section.
    pub fn ebar_section(&self, v: &GVector) -> Result<EbarSection> {
        let alpha = self.ebar_coords(v)?;
        Ok(EbarSection::from_terms(self.chart, 1, alpha.into_iter().enumerate().map(|(a, c)| (1u32 << a, c))))
    }

    /// The `conj(E)` section of a Λ¹ section.
    pub fn ebar_vector(&self, s: &EbarSection) -> GVector {
        assert_eq!(s.degree, 1, "only degree one sections are vectors");
        let alpha: Vec<RationalFn> = (0..self.e_frame.len()).map(|a| s.coeff(1 << a)).collect();
        self.combine_dual(&alpha)
    }

    /// Lie algebroid differential of `conj(E) = E*` applied to a section of
    /// `Λ^p conj(E)`:
    /// `(d a)(e_0..e_p) = sum (-1)^i e_i(a(..^i..))
    ///  + sum_{i<j} (-1)^{i+j} a([e_i,e_j], ..^i..^j..)`.
    pub fn algebroid_dbar(&self, s: &EbarSection) -> Result<EbarSection> {
        let c = self.structure_constants()?;
        let r = self.e_frame.len();
        let p = s.degree;
        let chart = self.chart;
        let mut out = EbarSection::zero(chart, p + 1);
        for mask in (0u32..1 << r).filter(|m| m.count_ones() as usize == p + 1) {
            let idx: Vec<usize> = (0..r).filter(|a| mask >> a & 1 == 1).collect();
            let mut acc = RationalFn::zero(chart);
            for (i, &ei) in idx.iter().enumerate() {
                let rest = mask & !(1 << ei);
                let val = s.coeff(rest);
                if !val.is_zero() {
                    let term = self.e_frame[ei].apply(&val);
                    acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
                }
            }
            for i in 0..idx.len() {
                for j in i + 1..idx.len() {
                    let rest: Vec<usize> =
                        idx.iter().enumerate().filter(|(t, _)| *t != i && *t != j).map(|(_, &a)| a).collect();
                    let mut term = RationalFn::zero(chart);
                    for (k, ck) in c[idx[i]][idx[j]].iter().enumerate() {
                        if ck.is_zero() {
                            continue;
                        }
                        let mut args = vec![k];
                        args.extend(rest.iter().copied());
                        let v = s.eval_ordered(&args);
                        if !v.is_zero() {
                            term = &term + &(ck * &v);
                        }
                    }
                    acc = if (i + j) % 2 == 0 { &acc + &term } else { &acc - &term };
                }
            }
            out.add(mask, &acc);
        }
        Ok(out)
    }
}

/// Integrability witness `v` with `d rho = v . rho`, solved over the field
/// of rational functions.
pub fn integrability_witness(rho: &Form) -> Result<GVector> {
    let chart = rho.chart();
    let m = clifford_matrix(rho);
    let rhs = form_coords(&rho.ext_d());
    let x =
        m.solve(&rhs).ok_or_else(|| Error::NoWitness("d rho is not in the image of Clifford multiplication".into()))?;
    Ok(GVector::from_coords(chart, &x))
}

/// Purity test at a point: the dimension of the Clifford annihilator of
/// the evaluated spinor must equal the real dimension.
pub fn is_pure(rho: &Form, point: &[GaussianRational]) -> Result<PurityVerdict> {
    let chart = rho.chart();
    let at = rho.at_point(point)?;
    if at.is_zero() {
        return Err(Error::Precondition("spinor vanishes at the point".into()));
    }
    let m = eval_matrix(&clifford_matrix(&at), point)?;
    let dim = m.nullspace().len();
    Ok(PurityVerdict { pure: dim == chart.nvars(), annihilator_dim: dim })
}

/// `X` with `i_X w = -df` for a constant nondegenerate two-form.
fn symplectic_hamiltonian(omega: &Form, df: &Form) -> Option<Vec<RationalFn>> {
    let chart = omega.chart();
    let n = chart.nvars();
    // i_X w = sum_b (sum_a X^a W_ab) e^b, with W the coefficient matrix.
    let mut w = zeros(chart, n, n);
    for a in 0..n {
        let ia = omega.interior_gen(a);
        for b in 0..n {
            w[(b, a)] = ia.coeff(1 << b);
        }
    }
    let rhs: Vec<RationalFn> = (0..n).map(|b| -&df.coeff(1 << b)).collect();
    w.solve(&rhs)
}

fn ubasis_subsets(r: usize) -> Vec<u32> {
    let mut s: Vec<u32> = (0..1u32 << r).collect();
    s.sort_by_key(|m| (m.count_ones(), *m));
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurityVerdict {
    pub pure: bool,
    pub annihilator_dim: usize,
}

/// Components of a form along `U_{-m} .. U_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct UkDecomposition {
    m: usize,
    parts: Vec<Form>,
}

impl UkDecomposition {
    pub fn level(&self, k: i32) -> Form {
        let m = self.m as i32;
        if k < -m || k > m {
            return Form::zero(self.parts[0].chart());
        }
        self.parts[(k + m) as usize].clone()
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        let m = self.m as i32;
        -m..=m
    }

    /// Levels with a nonzero component.
    pub fn support(&self) -> Vec<i32> {
        self.levels().filter(|&k| !self.level(k).is_zero()).collect()
    }

    pub fn concentrated_in(&self) -> Option<i32> {
        match self.support().as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }

    pub fn sum(&self) -> Form {
        self.parts.iter().fold(Form::zero(self.parts[0].chart()), |a, b| &a + b)
    }
}

/// Which `U_k` levels are nonzero at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointUk {
    m: usize,
    nonzero: Vec<bool>,
}

impl PointUk {
    pub fn support(&self) -> Vec<i32> {
        let m = self.m as i32;
        (-m..=m).filter(|k| self.nonzero[(k + m) as usize]).collect()
    }

    pub fn concentrated_in(&self) -> Option<i32> {
        match self.support().as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmanifoldVerdict {
    pub generalized_complex: bool,
    pub via_j: bool,
    pub via_uk: bool,
}

/// Weighted points `T = sum lambda_i delta(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCurrent {
    points: Vec<Vec<GaussianRational>>,
    weights: Vec<GaussianRational>,
}

impl PointCurrent {
    pub fn new(points: Vec<Vec<GaussianRational>>, weights: Vec<GaussianRational>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Precondition("one weight per point is required".into()));
        }
        if weights.iter().any(Zero::is_zero) {
            return Err(Error::Precondition("weights must be nonzero".into()));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::Precondition(format!("points {} and {} coincide", i + 1, j + 1)));
                }
            }
        }
        Ok(PointCurrent { points, weights })
    }

    pub fn points(&self) -> &[Vec<GaussianRational>] {
        &self.points
    }

    pub fn weights(&self) -> &[GaussianRational] {
        &self.weights
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCurrentVerdict {
    pub in_u0: bool,
    pub per_point: Vec<bool>,
}

/// A section of `Λ^p conj(E)`, written in the basis of wedge products of
/// the dual frame `f_a` (bitmask keys over `a`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EbarSection {
    chart: Chart,
    degree: usize,
    coeffs: BTreeMap<u32, RationalFn>,
}

impl EbarSection {
    pub fn zero(chart: Chart, degree: usize) -> Self {
        EbarSection { chart, degree, coeffs: BTreeMap::new() }
    }

    pub fn function(f: RationalFn) -> Self {
        let mut s = Self::zero(f.chart(), 0);
        s.add(0, &f);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, RationalFn)>>(chart: Chart, degree: usize, terms: I) -> Self {
        let mut s = Self::zero(chart, degree);
        for (m, c) in terms {
            assert_eq!(m.count_ones() as usize, degree, "term degree");
            s.add(m, &c);
        }
        s
    }

    fn add(&mut self, mask: u32, c: &RationalFn) {
        if c.is_zero() {
            return;
        }
        let v = match self.coeffs.get(&mask) {
            Some(o) => o + c,
            None => c.clone(),
        };
        if v.is_zero() {
            self.coeffs.remove(&mask);
        } else {
            self.coeffs.insert(mask, v);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, mask: u32) -> RationalFn {
        self.coeffs.get(&mask).cloned().unwrap_or_else(|| RationalFn::zero(self.chart))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &RationalFn)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value on an ordered tuple of frame indices (antisymmetric).
    fn eval_ordered(&self, args: &[usize]) -> RationalFn {
        let mut mask = 0u32;
        let mut sign = 1;
        for &a in args {
            if mask >> a & 1 == 1 {
                return RationalFn::zero(self.chart);
            }
            sign *= wedge_sign(mask, 1 << a);
            mask |= 1 << a;
        }
        let c = self.coeff(mask);
        if sign < 0 {
            -c
        } else {
            c
        }
    }

    pub fn wedge(&self, o: &EbarSection) -> EbarSection {
        let mut out = EbarSection::zero(self.chart, self.degree + o.degree);
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &o.coeffs {
                let s = wedge_sign(*ma, *mb);
                if s != 0 {
                    let p = ca * cb;
                    out.add(ma | mb, &if s < 0 { -p } else { p });
                }
            }
        }
        out
    }

    pub fn plus(&self, o: &EbarSection) -> EbarSection {
        assert_eq!(self.degree, o.degree, "degree mismatch");
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add(*m, c);
        }
        out
    }

    pub fn scale(&self, f: &RationalFn) -> EbarSection {
        let mut out = EbarSection::zero(self.chart, self.degree);
        for (m, c) in &self.coeffs {
            out.add(*m, &(c * f));
        }
        out
    }
}

/// Canonical text over the dual frame names `f1, f2, ...`.
impl fmt::Display for EbarSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.coeffs.iter().map(|(m, c)| {
            let sym = (0..32).filter(|a| m >> a & 1 == 1).map(|a| format!("f{}", a + 1)).collect::<Vec<_>>().join("^");
            c.render_times(&sym)
        });
        write!(f, "{}", crate::coeffs::poly::join_terms(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Chart {
        Chart::new(2)
    }
    fn q(a: i64) -> GaussianRational {
        GaussianRational::from_int(a)
    }

    #[test]
    fn poisson_normal_form_spinor_and_witness() {
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        assert_eq!(s.rho().to_string(), "z1+dz1^dz2");
        assert_eq!(s.tau(), RationalFn::var(c2(), 0));
        let w = s.check_integrable().unwrap();
        let expect = -&GVector::coord(c2(), 1);
        assert!((&w - &expect).clifford(s.rho()).is_zero());
        assert_eq!(s.type_at(&[q(1), q(0)]).unwrap(), 0);
        assert_eq!(s.type_at(&[q(0), q(5)]).unwrap(), 2);
    }

    #[test]
    fn complex_frame() {
        let s = GCStructure::from_complex(2).unwrap();
        let names: Vec<String> = s.e_frame().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, vec!["vec: eb1; form: 0", "vec: eb2; form: 0", "vec: 0; form: dz1", "vec: 0; form: dz2"]);
    }

    #[test]
    fn symplectic_rho_starts_at_one() {
        let s = GCStructure::from_symplectic(&GCStructure::standard_omega(2)).unwrap();
        assert!(s.tau().is_one());
        assert!(s.check_integrable().unwrap().is_zero());
    }

    #[test]
    fn purity_examples() {
        let rho = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap().rho().clone();
        for pt in [[q(1), q(0)], [q(0), q(0)]] {
            let v = is_pure(&rho, &pt).unwrap();
            assert!(v.pure);
            assert_eq!(v.annihilator_dim, 4);
        }
        let c = c2();
        let dz = |g| Form::gen(c, g);
        let impure = &(&Form::one(c) + &dz(0).wedge(&dz(1))) + &dz(2).wedge(&dz(3));
        assert!(!is_pure(&impure, &[q(1), q(1)]).unwrap().pure);
    }

    #[test]
    fn dolbeault_of_z2_in_normal_form() {
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        let f = RationalFn::var(c2(), 2);
        let d = s.dolbeault_function(&f);
        assert_eq!(d.to_string(), "vec: z1*e1; form: 0");
        assert_eq!(s.dolbeault_closed_form(&f).unwrap(), d);
    }

    #[test]
    fn point_current_on_curve() {
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        let t = PointCurrent::new(vec![vec![q(0), q(1)], vec![q(0), q(-1)]], vec![q(1), q(-1)]).unwrap();
        assert!(s.point_current_u0(&t).unwrap().in_u0);
        let t2 = PointCurrent::new(vec![vec![q(0), q(1)], vec![q(1), q(0)]], vec![q(1), q(-1)]).unwrap();
        let v = s.point_current_u0(&t2).unwrap();
        assert_eq!(v.per_point, vec![true, false]);
    }

    #[test]
    fn complex_uk_is_p_minus_q() {
        let s = GCStructure::from_complex(2).unwrap();
        for mask in 0..16u32 {
            let a = Form::basis(mask, RationalFn::one(c2()));
            let (p, q) = a.bidegree_of(mask);
            let dec = s.uk_decompose(&a).unwrap();
            assert_eq!(dec.concentrated_in(), Some(p as i32 - q as i32), "mask {mask}");
        }
    }

    #[test]
    fn poisson_uk_of_one_resums() {
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        let one = Form::one(c2());
        let dec = s.uk_decompose(&one).unwrap();
        assert_eq!(dec.concentrated_in(), Some(0));
        let top = Form::basis(0b1111, RationalFn::one(c2()));
        let dec = s.uk_decompose(&top).unwrap();
        assert_eq!(dec.sum(), top);
        assert_eq!(dec.support(), vec![-2, 0, 2]);
        assert!(dec.level(0).terms().any(|(_, c)| !c.is_polynomial() || c.constant_value().is_none()));
        let (dbar, del) = s.decompose_d(s.rho()).unwrap();
        assert_eq!(dbar, Form::gen(c2(), 0));
        assert!(del.is_zero());
    }

    #[test]
    fn algebroid_dbar_matches_dolbeault_and_squares_to_zero() {
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        let z = |i| RationalFn::var(c2(), i);
        let f = &(&z(0) * &z(3)) + &(&z(2) * &z(2));
        let d0 = s.algebroid_dbar(&EbarSection::function(f.clone())).unwrap();
        assert_eq!(s.ebar_vector(&d0), s.dolbeault_function(&f));
        let d1 = s.algebroid_dbar(&d0).unwrap();
        assert!(d1.is_zero());
        let sec = s.ebar_section(&GVector::coord(c2(), 0).scale(&z(1))).unwrap();
        let dd = s.algebroid_dbar(&s.algebroid_dbar(&sec).unwrap()).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn complex_algebroid_is_classical_dbar() {
        let s = GCStructure::from_complex(2).unwrap();
        let c = c2();
        let f = &RationalFn::var(c, 0) * &RationalFn::var(c, 3);
        let sec = s.ebar_section(&GVector::coform(c, 2).scale(&f)).unwrap();
        let d = s.algebroid_dbar(&sec).unwrap();
        // dual frame: f1, f2 = dzb1, dzb2; f3, f4 = d/dz1, d/dz2
        assert_eq!(d.to_string(), "-z1*f1^f2");
    }

    #[test]
    fn symplectic_dolbeault_closed_form() {
        let s = GCStructure::from_symplectic(&GCStructure::standard_omega(2)).unwrap();
        let c = c2();
        let f = &(&RationalFn::var(c, 0) * &RationalFn::var(c, 1)) + &RationalFn::var(c, 3);
        assert_eq!(s.dolbeault_closed_form(&f).unwrap(), s.dolbeault_function(&f));
    }

    #[test]
    fn lagrangian_plane_is_generalized_complex() {
        let s = GCStructure::from_symplectic(&GCStructure::standard_omega(2)).unwrap();
        let c = c2();
        let dx = |i: usize| &GVector::coord(c, i) + &GVector::coord(c, 2 + i);
        let origin = [q(0), q(0)];
        assert!(s.submanifold_check(&[dx(0), dx(1)], &origin).unwrap().generalized_complex);
        assert!(!s.submanifold_check(&[], &origin).unwrap().generalized_complex);
        let p = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        assert!(p.submanifold_check(&[], &[q(0), q(3)]).unwrap().generalized_complex);
        assert!(!p.submanifold_check(&[], &[q(1), q(0)]).unwrap().generalized_complex);
    }

    #[test]
    fn mismatched_frame_has_no_witness() {
        let c = c2();
        let rho = &Form::scalar(RationalFn::var(c, 2)) + &Form::gen(c, 0).wedge(&Form::gen(c, 1));
        let frame = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap().e_frame().to_vec();
        let s = GCStructure::unchecked(rho, frame).unwrap();
        assert!(matches!(s.check_integrable(), Err(Error::NoWitness(_))));
    }

    #[test]
    fn non_integrable_spinor_has_no_witness() {
        let c = c2();
        let dz = |g| Form::gen(c, g);
        let rho = &dz(0).wedge(&dz(1)) + &dz(0).wedge(&dz(2)).scale(&RationalFn::var(c, 3));
        let s = GCStructure::from_spinor(&rho).unwrap();
        assert!(matches!(s.check_integrable(), Err(Error::NoWitness(_))));
    }
}
