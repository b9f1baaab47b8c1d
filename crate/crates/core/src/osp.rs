//! The osp(2n+1|2m) tower on a Fock module.
//!
//! Green generators are the images a_i^± = c_i^±, H_i = (-1)^⟨i⟩ N_i - 1/2.
//! Chevalley generators follow from them:
//!
//! ```text
//! e_i = ½ L̄_{i+1} [[a_i^-, a_{i+1}^+]]      f_i = ½ [[a_i^+, a_{i+1}^-]] L_{i+1}      (i < N)
//! e_N = a_N^- / √2                          f_N = -a_N^+ / √2
//! h_i = H_i - H_{i+1}                       h_N = H_N
//! ```
//!
//! with L_i = q^{H_i}. Cartan eigenvalues are half-integers and are kept as
//! doubled integers so every power of q is an integer power of q^{1/2}.

use crate::clifford::{CliffordBundle, Ladder};
use crate::cyclo::ScalarField;
use crate::error::Result;
use crate::matrix::OperatorMatrix;
use crate::qcore::{anticommutator, build_cartan_osp, commutator, gbracket, gbracket_x, twisted, CartanMatrix, Parity};
use crate::report::{Checker, IndexTuple, VerificationReport};

type Mat<F> = OperatorMatrix<<F as ScalarField>::El>;

/// Green and Chevalley generators of osp(2n+1|2m) acting on one Fock module.
#[derive(Debug, Clone)]
pub struct OspBundle<F: ScalarField> {
    clifford: CliffordBundle<F>,
    cartan: CartanMatrix,
    /// 2H_i eigenvalue per basis vector, i = 1..=N.
    green_h2: Vec<Vec<i64>>,
    green_h: Vec<Mat<F>>,
    /// 2h_i eigenvalue per basis vector.
    chev_h2: Vec<Vec<i64>>,
    chev_h: Vec<Mat<F>>,
    e: Vec<Mat<F>>,
    f: Vec<Mat<F>>,
}

fn unwrap_dim<T>(r: Result<T>) -> T {
    r.expect("generators share one dimension")
}

impl<F: ScalarField> OspBundle<F> {
    pub fn clifford(&self) -> &CliffordBundle<F> {
        &self.clifford
    }

    pub fn field(&self) -> &F {
        self.clifford.field()
    }

    pub fn modes(&self) -> usize {
        self.clifford.modes()
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    /// a_i^±.
    pub fn a(&self, i: usize, ladder: Ladder) -> &Mat<F> {
        self.clifford.c(i, ladder)
    }

    /// H_i.
    pub fn green_h(&self, i: usize) -> &Mat<F> {
        &self.green_h[i - 1]
    }

    /// Doubled eigenvalues of H_i in basis order.
    pub fn green_h_doubled(&self, i: usize) -> &[i64] {
        &self.green_h2[i - 1]
    }

    /// q^{p H_i} as a diagonal matrix.
    pub fn l_pow(&self, i: usize, p: i64) -> Mat<F> {
        self.q_half_diag(&self.green_h2[i - 1], p)
    }

    pub fn h(&self, i: usize) -> &Mat<F> {
        &self.chev_h[i - 1]
    }

    pub fn h_doubled(&self, i: usize) -> &[i64] {
        &self.chev_h2[i - 1]
    }

    /// k_i^p = q^{p h_i}.
    pub fn k_pow(&self, i: usize, p: i64) -> Mat<F> {
        self.q_half_diag(&self.chev_h2[i - 1], p)
    }

    pub fn e(&self, i: usize) -> &Mat<F> {
        &self.e[i - 1]
    }

    pub fn f(&self, i: usize) -> &Mat<F> {
        &self.f[i - 1]
    }

    fn q_half_diag(&self, doubled: &[i64], p: i64) -> Mat<F> {
        let fl = self.field();
        OperatorMatrix::diagonal(fl, doubled.iter().map(|d| fl.q_half_pow(p * d)).collect())
    }
}

fn half_diag<F: ScalarField>(field: &F, doubled: &[i64]) -> Mat<F> {
    OperatorMatrix::diagonal(field, doubled.iter().map(|d| field.from_ratio(*d, 2).expect("2 is invertible")).collect())
}

/// Builds the Green and Chevalley generators from a Clifford bundle.
///
/// Works in either basis and over either backend: the number operators are
/// diagonal in both bases, so every Cartan element is diagonal too.
pub fn build_osp<F: ScalarField>(bundle: &CliffordBundle<F>) -> Result<OspBundle<F>> {
    let field = bundle.field();
    let module = bundle.module();
    let g = module.grading();
    let modes = module.modes();
    let cartan = build_cartan_osp(g)?;

    let green_h2: Vec<Vec<i64>> = (1..=modes)
        .map(|i| module.basis().iter().map(|v| 2 * g.sign(i) * v.get(i) as i64 - 1).collect())
        .collect();
    let green_h = green_h2.iter().map(|d| half_diag(field, d)).collect();
    let chev_h2: Vec<Vec<i64>> = (1..=modes)
        .map(|i| {
            if i < modes {
                green_h2[i - 1].iter().zip(&green_h2[i]).map(|(a, b)| a - b).collect()
            } else {
                green_h2[i - 1].clone()
            }
        })
        .collect();
    let chev_h = chev_h2.iter().map(|d| half_diag(field, d)).collect();

    let half = field.from_ratio(1, 2)?;
    let inv_sqrt2 = field.inv(&field.sqrt2())?;
    let q_half_diag = |doubled: &[i64], p: i64| -> Mat<F> {
        OperatorMatrix::diagonal(field, doubled.iter().map(|d| field.q_half_pow(p * d)).collect())
    };
    let mut e = Vec::with_capacity(modes);
    let mut f = Vec::with_capacity(modes);
    // green_h2 is 0-based, so entry i belongs to mode i + 1
    for (i, h_next) in green_h2.iter().enumerate().skip(1) {
        let lbar = q_half_diag(h_next, -1);
        let l = q_half_diag(h_next, 1);
        let be = gbracket(field, bundle.c(i, Ladder::Lower), bundle.c(i + 1, Ladder::Raise))?;
        let bf = gbracket(field, bundle.c(i, Ladder::Raise), bundle.c(i + 1, Ladder::Lower))?;
        let parity = be.parity();
        e.push(lbar.mul(field, &be)?.scale(field, &half).with_parity(parity));
        f.push(bf.mul(field, &l)?.scale(field, &half).with_parity(parity));
    }
    e.push(bundle.c(modes, Ladder::Lower).scale(field, &inv_sqrt2));
    f.push(bundle.c(modes, Ladder::Raise).scale(field, &field.neg(&inv_sqrt2)));

    Ok(OspBundle {
        clifford: bundle.clone(),
        cartan,
        green_h2,
        green_h,
        chev_h2,
        chev_h,
        e,
        f,
    })
}

/// Checks the Green-generator presentation.
pub fn verify_green_relations<F: ScalarField>(osp: &OspBundle<F>, tolerance: f64) -> VerificationReport {
    let fl = osp.field();
    let g = osp.clifford().module().grading();
    let modes = osp.modes();
    let dim = osp.clifford().dim();
    let inv = fl.inv_q_diff();
    let mut ch = Checker::new(fl, "osp", tolerance);

    for i in 1..=modes {
        for j in 1..=modes {
            let r = unwrap_dim(commutator(fl, osp.green_h(i), osp.green_h(j)));
            ch.zero("osp.green.cartan_commute", IndexTuple::new().at("i", i as i64).at("j", j as i64), &r);
            for lad in Ladder::BOTH {
                let a = osp.a(j, lad);
                let lhs = unwrap_dim(commutator(fl, osp.green_h(i), a));
                let rhs = if i == j { a.scale(fl, &fl.from_i64(lad.sign() * g.sign(i))) } else { OperatorMatrix::zeros(dim, a.parity()) };
                ch.equal(
                    "osp.green.weight",
                    IndexTuple::new().at("i", i as i64).at("j", j as i64).sign("sign", lad.sign()),
                    &lhs,
                    &rhs,
                );
            }
        }
    }

    for i in 1..=modes {
        let lhs = unwrap_dim(gbracket(fl, osp.a(i, Ladder::Lower), osp.a(i, Ladder::Raise)));
        let diff = unwrap_dim(osp.l_pow(i, 1).sub(fl, &osp.l_pow(i, -1)));
        let rhs = diff.scale(fl, &fl.mul(&fl.from_i64(-2), &inv));
        ch.equal("osp.green.pair", IndexTuple::new().at("i", i as i64), &lhs, &rhs);
    }

    if modes >= 2 {
        for xi in Ladder::BOTH {
            let inner = unwrap_dim(gbracket(fl, osp.a(modes - 1, xi), osp.a(modes, xi)));
            let x = fl.q_pow(-g.sign(modes));
            let r = unwrap_dim(twisted(fl, &inner, osp.a(modes, xi), &x));
            ch.zero("osp.green.top_serre", IndexTuple::new().sign("xi", xi.sign()), &r);
        }
    }

    for i in 1..=modes {
        for xi in Ladder::BOTH {
            let partner = i as i64 + xi.sign();
            if partner < 1 || partner > modes as i64 {
                continue;
            }
            let partner = partner as usize;
            for eta in Ladder::BOTH {
                let inner = unwrap_dim(gbracket(fl, osp.a(i, eta), osp.a(partner, eta.opposite())));
                for j in 1..=modes {
                    let twist_exp = if i == j { -xi.sign() * g.sign(i) } else { 0 };
                    let lhs = unwrap_dim(gbracket_x(fl, &inner, osp.a(j, eta), &fl.q_pow(twist_exp)));
                    let rhs = if j == partner {
                        let coeff = if eta == Ladder::Lower && g.parity(j) == Parity::Odd { -2 } else { 2 };
                        let lp = osp.l_pow(j, -xi.sign() * eta.sign());
                        unwrap_dim(lp.mul(fl, osp.a(i, eta))).scale(fl, &fl.from_i64(coeff))
                    } else {
                        OperatorMatrix::zeros(lhs.dim(), lhs.parity())
                    };
                    ch.equal(
                        "osp.green.triple",
                        IndexTuple::new()
                            .at("i", i as i64)
                            .at("j", j as i64)
                            .sign("xi", xi.sign())
                            .sign("eta", eta.sign()),
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
    }
    ch.finish()
}

/// Which family of Chevalley generators a Serre check runs over.
#[derive(Clone, Copy)]
enum Family {
    E,
    F,
}

impl Family {
    fn tag(self) -> &'static str {
        match self {
            Family::E => "e",
            Family::F => "f",
        }
    }
}

/// Checks the Cartan–Kac relations and both families of Serre relations.
pub fn verify_chevalley_relations<F: ScalarField>(osp: &OspBundle<F>, tolerance: f64) -> VerificationReport {
    let fl = osp.field();
    let g = osp.clifford().module().grading();
    let modes = osp.modes();
    let a = osp.cartan();
    let inv = fl.inv_q_diff();
    let mut ch = Checker::new(fl, "osp", tolerance);

    for i in 1..=modes {
        let want = if i == g.m { Parity::Odd } else { Parity::Even };
        ch.holds(
            "osp.chevalley.parity",
            IndexTuple::new().at("i", i as i64),
            osp.e(i).parity() == Some(want) && osp.f(i).parity() == Some(want),
        );
        for j in 1..=modes {
            let idx = IndexTuple::new().at("i", i as i64).at("j", j as i64);
            ch.zero("osp.chevalley.cartan_commute", idx.clone(), &unwrap_dim(commutator(fl, osp.h(i), osp.h(j))));
            let aij = fl.from_i64(a.get(i, j));
            let lhs = unwrap_dim(commutator(fl, osp.h(i), osp.e(j)));
            ch.equal("osp.chevalley.weight_e", idx.clone(), &lhs, &osp.e(j).scale(fl, &aij));
            let lhs = unwrap_dim(commutator(fl, osp.h(i), osp.f(j)));
            ch.equal("osp.chevalley.weight_f", idx.clone(), &lhs, &osp.f(j).scale(fl, &fl.neg(&aij)));
            let lhs = unwrap_dim(gbracket(fl, osp.e(i), osp.f(j)));
            let rhs = if i == j {
                unwrap_dim(osp.k_pow(i, 1).sub(fl, &osp.k_pow(i, -1))).scale(fl, &inv)
            } else {
                OperatorMatrix::zeros(lhs.dim(), lhs.parity())
            };
            ch.equal("osp.chevalley.ef", idx, &lhs, &rhs);
        }
    }

    for fam in [Family::E, Family::F] {
        let x = |i: usize| match fam {
            Family::E => osp.e(i),
            Family::F => osp.f(i),
        };
        let rel = |name: &str| format!("osp.serre.{}.{}", fam.tag(), name);
        serre_osp(&mut ch, fl, g.m, modes, &x, &rel);
    }
    ch.finish()
}

fn serre_osp<'m, F: ScalarField>(
    ch: &mut Checker<'_, F>,
    fl: &F,
    m: usize,
    modes: usize,
    x: &dyn Fn(usize) -> &'m Mat<F>,
    rel: &dyn Fn(&str) -> String,
) where
    F::El: 'm,
{
    let q = fl.q_pow(1);
    let qb = fl.q_pow(-1);
    for i in 1..=modes {
        for j in 1..=modes {
            if i != j && i.abs_diff(j) != 1 {
                let r = unwrap_dim(gbracket(fl, x(i), x(j)));
                ch.zero(&rel("commute"), IndexTuple::new().at("i", i as i64).at("j", j as i64), &r);
            }
        }
    }
    if m >= 1 && m < modes {
        let r = unwrap_dim(x(m).mul(fl, x(m)));
        ch.zero(&rel("square"), IndexTuple::new().at("i", m as i64), &r);
    }
    for i in 1..=modes {
        if i == m || i == modes {
            continue;
        }
        for d in [1i64, -1] {
            let nb = i as i64 + d;
            if nb < 1 || nb > modes as i64 {
                continue;
            }
            for (order, inner_t, outer_t) in [(-1i64, &qb, &q), (1, &q, &qb)] {
                let inner = unwrap_dim(twisted(fl, x(i), x(nb as usize), inner_t));
                let r = unwrap_dim(twisted(fl, x(i), &inner, outer_t));
                ch.zero(
                    &rel("cubic"),
                    IndexTuple::new().at("i", i as i64).sign("d", d).sign("inner", order),
                    &r,
                );
            }
        }
    }
    if m >= 2 && m < modes {
        for (order, t_left, t_right) in [(1i64, &q, &qb), (-1, &qb, &q)] {
            let left = unwrap_dim(twisted(fl, x(m), x(m - 1), t_left));
            let right = unwrap_dim(twisted(fl, x(m), x(m + 1), t_right));
            let r = unwrap_dim(anticommutator(fl, &left, &right));
            ch.zero(&rel("odd_node"), IndexTuple::new().sign("inner", order), &r);
        }
    }
    if modes >= 2 {
        let top = x(modes);
        for (order, t_in, t_out) in [(-1i64, &qb, &q), (1, &q, &qb)] {
            let inner = unwrap_dim(twisted(fl, top, x(modes - 1), t_in));
            let mid = unwrap_dim(gbracket(fl, top, &inner));
            let r = unwrap_dim(twisted(fl, top, &mid, t_out));
            ch.zero(&rel("quartic"), IndexTuple::new().sign("inner", order), &r);
        }
    }
}

/// Rebuilds the Green generators from Chevalley ones and compares exactly:
///
/// ```text
/// a_i^- = (-1)^{(m-i)⟨i⟩} √2 [e_i, [e_{i+1}, … [e_{N-1}, e_N]_{q_{N-1}} …]_{q_{i+1}}]_{q_i}
/// a_i^+ = (-1)^{N-i+1} √2 [[…[f_N, f_{N-1}]_{q̄_{N-1}}, …]_{q̄_{i+1}}, f_i]_{q̄_i}
/// H_i   = h_i + … + h_N
/// ```
///
/// with q_i = q^{(-1)^⟨i+1⟩}. Also rebuilds e_i, f_i, h_i from the
/// reconstructed Green generators (the round trip).
pub fn reconstruct_green<F: ScalarField>(osp: &OspBundle<F>, tolerance: f64) -> VerificationReport {
    let fl = osp.field();
    let g = osp.clifford().module().grading();
    let modes = osp.modes();
    let sqrt2 = fl.sqrt2();
    let mut ch = Checker::new(fl, "osp", tolerance);
    let qi = |i: usize, p: i64| fl.q_pow(p * g.sign(i + 1));

    let mut lower = Vec::with_capacity(modes);
    let mut raise = Vec::with_capacity(modes);
    for i in 1..=modes {
        let mut acc = osp.e(modes).clone();
        for j in (i..modes).rev() {
            acc = unwrap_dim(twisted(fl, osp.e(j), &acc, &qi(j, 1)));
        }
        let sign = if ((g.m as i64 - i as i64) * g.parity(i).bit()).rem_euclid(2) == 1 { -1 } else { 1 };
        let am = acc.scale(fl, &fl.mul(&fl.from_i64(sign), &sqrt2)).with_parity(Some(g.parity(i)));

        let mut acc = osp.f(modes).clone();
        for j in (i..modes).rev() {
            acc = unwrap_dim(twisted(fl, &acc, osp.f(j), &qi(j, -1)));
        }
        let sign = if (modes - i + 1) % 2 == 1 { -1 } else { 1 };
        let ap = acc.scale(fl, &fl.mul(&fl.from_i64(sign), &sqrt2)).with_parity(Some(g.parity(i)));

        let idx = IndexTuple::new().at("i", i as i64);
        ch.equal("osp.reconstruct.lower", idx.clone(), &am, osp.a(i, Ladder::Lower));
        ch.equal("osp.reconstruct.raise", idx.clone(), &ap, osp.a(i, Ladder::Raise));
        let mut hs = osp.h(i).clone();
        for j in (i + 1)..=modes {
            hs = unwrap_dim(hs.add(fl, osp.h(j)));
        }
        ch.equal("osp.reconstruct.cartan", idx, &hs, osp.green_h(i));
        lower.push(am);
        raise.push(ap);
    }

    // Chevalley generators again, from the reconstructed Green side
    let half = fl.from_ratio(1, 2).expect("2 is invertible");
    let inv_sqrt2 = fl.inv(&sqrt2).expect("√2 is nonzero");
    for i in 1..=modes {
        let idx = IndexTuple::new().at("i", i as i64);
        let (e, f) = if i < modes {
            let be = unwrap_dim(gbracket(fl, &lower[i - 1], &raise[i]));
            let bf = unwrap_dim(gbracket(fl, &raise[i - 1], &lower[i]));
            (
                unwrap_dim(osp.l_pow(i + 1, -1).mul(fl, &be)).scale(fl, &half),
                unwrap_dim(bf.mul(fl, &osp.l_pow(i + 1, 1))).scale(fl, &half),
            )
        } else {
            (lower[i - 1].scale(fl, &inv_sqrt2), raise[i - 1].scale(fl, &fl.neg(&inv_sqrt2)))
        };
        ch.equal("osp.round_trip.e", idx.clone(), &e, osp.e(i));
        ch.equal("osp.round_trip.f", idx, &f, osp.f(i));
    }
    ch.finish()
}

/// All osp checks: Green presentation, Chevalley presentation, reconstruction.
pub fn verify_osp<F: ScalarField>(bundle: &CliffordBundle<F>, tolerance: f64) -> Result<VerificationReport> {
    let osp = build_osp(bundle)?;
    let mut r = verify_green_relations(&osp, tolerance);
    r.merge(verify_chevalley_relations(&osp, tolerance));
    r.merge(reconstruct_green(&osp, tolerance));
    r.sort();
    Ok(r)
}
