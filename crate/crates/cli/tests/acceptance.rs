//! Acceptance gate: one test per criterion, named so the harness output
//! reads as the checklist. Exactness criteria compare symbolic results for
//! equality; decay criteria use the certified factor-two tail test; index
//! criteria demand exact integers at two stabilized windows.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use suq2_core::algebra::{AlgebraElement, LaurentPoly};
use suq2_core::connes::{differential, higher_form_vanishing_check};
use suq2_core::dirac::{
    boundedness_gate, closed_letter_commutator, direct_commutator, four_term_commutator,
    multiplicity_table_stabilized, summability_profile, DiracSpec, Letter, SummabilityTrend,
};
use suq2_core::fredholm::{
    multiplicity_pairing, sign_pairing, u_pairing, ColumnProjection, PFamily,
};
use suq2_core::l2::{
    antiderivative_relation, circle_differential, delta_power_relation, l2_differential,
    power_reduction_relation, CircleForm, DifferentialMode,
};
use suq2_core::podles::{
    hop_amplitude_sq, sphere_boundedness_certificates, sphere_index_pairing, Leg, SphereElement,
    SphereProjection,
};
use suq2_core::represent::{represent, star_defect_is_zero};
use suq2_core::scalar::{rat, rat_int};
use suq2_core::{PlaneWindow, Rat};

fn q_half() -> Rat {
    rat(1, 2)
}

/// Monomials with |i|, j, k bounded by `r`, unit coefficient.
fn monomial_grid(q: &Rat, r: i32) -> Vec<AlgebraElement<Rat>> {
    let mut out = Vec::new();
    for i in -r..=r {
        for j in 0..=r as u32 {
            for k in 0..=r as u32 {
                out.push(AlgebraElement::monomial(q, i, j, k, Rat::one()).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_01_algebra_relations_and_products_are_exact() {
    let q = q_half();
    let defects = AlgebraElement::<Rat>::relation_defects(&q).unwrap();
    assert_eq!(defects.len(), 5);
    for (name, d) in &defects {
        assert!(d.is_zero(), "relation defect {name} is nonzero");
    }

    let grid = monomial_grid(&q, 2);
    assert_eq!(grid.len(), 45);
    for a in &grid {
        for b in &grid {
            let ab = a.mul(b).unwrap();
            let star = ab.adjoint();
            let rev = b.adjoint().mul(&a.adjoint()).unwrap();
            assert!(star.sub(&rev).unwrap().is_zero(), "involution reversal");
            for c in &grid {
                let left = ab.mul(c).unwrap();
                let right = a.mul(&b.mul(c).unwrap()).unwrap();
                assert!(left.sub(&right).unwrap().is_zero(), "associativity");
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let a = AlgebraElement::random(&q, &mut rng, 2, 2, 3).unwrap();
        let b = AlgebraElement::random(&q, &mut rng, 2, 2, 3).unwrap();
        let c = AlgebraElement::random(&q, &mut rng, 2, 2, 3).unwrap();
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert!(left.sub(&right).unwrap().is_zero(), "random associativity");
        let star = a.mul(&b).unwrap().adjoint();
        let rev = b.adjoint().mul(&a.adjoint()).unwrap();
        assert!(star.sub(&rev).unwrap().is_zero(), "random involution");
    }
    println!("criterion 1: PASS (5 exact relations, 45^3 grid triples, 200 random triples)");
}

#[test]
fn criterion_02_representation_is_faithful_to_products_and_adjoints() {
    let q = q_half();
    let grid = monomial_grid(&q, 2);
    for m in [8u32, 16] {
        let w = PlaneWindow::square(m);
        let reps: Vec<_> = grid.iter().map(|a| represent(a, w)).collect();
        for (a, pa) in grid.iter().zip(&reps) {
            assert!(star_defect_is_zero(a, w), "adjoint defect at window {m}");
            for (b, pb) in grid.iter().zip(&reps) {
                let ab = represent(&a.mul(b).unwrap(), w);
                let prod = pa.mul(pb).unwrap();
                assert!(
                    ab.eq_on_interior(&prod).unwrap().is_ok(),
                    "product defect at window {m}"
                );
            }
        }
    }
    println!("criterion 2: PASS (2025 products and 45 adjoints exact on windows 8 and 16)");
}

#[test]
fn criterion_03_commutator_formulas_match_matrix_commutators() {
    let q = q_half();
    let w = PlaneWindow::square(12);
    let spec = DiracSpec::generic();

    for letter in [
        Letter::Alpha,
        Letter::AlphaStar,
        Letter::Beta,
        Letter::BetaStar,
    ] {
        let closed = closed_letter_commutator(&q, w, letter);
        let direct = direct_commutator(&spec, &letter.element(&q), w);
        assert!(
            closed.eq_on_interior(&direct).unwrap().is_ok(),
            "closed form for {letter:?}"
        );
    }

    let mut count = 0usize;
    for i in -3..=3i32 {
        for j in 0..=3u32 {
            for k in 0..=3u32 {
                let a = AlgebraElement::monomial(&q, i, j, k, Rat::one()).unwrap();
                let ft = four_term_commutator(&a, w);
                let dir = direct_commutator(&spec, &a, w);
                assert!(
                    ft.eq_on_interior(&dir).unwrap().is_ok(),
                    "four-term decomposition at ({i},{j},{k})"
                );
                count += 1;
            }
        }
    }
    assert_eq!(count, 112);
    println!("criterion 3: PASS (4 letter formulas, 112 four-term decompositions, exact)");
}

#[test]
fn criterion_04_boundedness_gate_separates_the_candidates() {
    let cert = boundedness_gate(&DiracSpec::generic(), 8).unwrap();
    assert!(cert.first_leg.trend_is_bounded());
    assert!(cert.second_leg.trend_is_bounded());
    assert_eq!(cert.first_leg.scans, [8, 16, 32]);

    let fail = boundedness_gate(&DiracSpec::square_first_leg(), 8).unwrap_err();
    assert_eq!(fail.profile.maxima, [rat_int(15), rat_int(31), rat_int(63)]);
    assert_eq!(fail.profile.witnesses.map(|p| p.0), [8, 16, 32]);
    println!("criterion 4: PASS (generic candidate bounded across 8->16->32, squared candidate rejected with witness riding the scan edge)");
}

#[test]
fn criterion_05_multiplicities_and_summability_trends() {
    let spec = DiracSpec::generic();
    let table = multiplicity_table_stabilized(&spec, &rat_int(16), 40).unwrap();
    assert_eq!(table.len(), 33);
    for (v, count) in &table {
        let n = v.to_integer();
        let expected = if *v >= Rat::zero() {
            (&n + 1u32).to_string()
        } else {
            n.magnitude().to_string()
        };
        assert_eq!(
            count.to_string(),
            expected,
            "multiplicity at eigenvalue {v}"
        );
    }

    let lams = [rat_int(8), rat_int(16), rat_int(32)];
    for p in [1i64, 2] {
        let prof = summability_profile(&spec, &rat_int(p), &lams, 66).unwrap();
        assert_eq!(prof.trend, SummabilityTrend::Divergent, "p = {p}");
    }
    let prof = summability_profile(&spec, &rat_int(3), &lams, 66).unwrap();
    assert_eq!(prof.trend, SummabilityTrend::Convergent);
    println!("criterion 5: PASS (33 exact levels to |d| = 16, divergent at p = 1, 2, convergent at p = 3)");
}

#[test]
fn criterion_06_index_table_with_two_window_stabilization() {
    let cert = sign_pairing(&DiracSpec::generic(), 12).unwrap();
    assert_eq!(cert.windows, (12, 24));
    assert_eq!(cert.index, 1);

    for (family, expected) in [(PFamily::P1, -1i64), (PFamily::P3, 0), (PFamily::P4, 0)] {
        let p = ColumnProjection::new(family, 2, [0, 1]).unwrap();
        let cert = u_pairing(&p, 12).unwrap();
        assert_eq!(cert.windows, (12, 24));
        assert_eq!(cert.index, expected, "{family:?}");
        assert_eq!(cert.counts.0.index(), cert.counts.1.index());
    }
    println!("criterion 6: PASS (indices 1, -1, 0, 0 exact at windows 12 and 24)");
}

#[test]
fn criterion_07_multiplicity_pairing_returns_the_count() {
    for mult in [-3i64, -2, -1, 1, 2, 3] {
        let cert = multiplicity_pairing(mult, 12).unwrap();
        assert_eq!(cert.index, mult, "stacked count {mult}");
        assert_eq!(cert.windows, (12, 24));
    }
    println!("criterion 7: PASS (signed counts -3..=3 recovered exactly)");
}

#[test]
fn criterion_08_sphere_relations_boundedness_and_index() {
    for (q, c) in [(rat(1, 2), rat_int(2)), (rat(3, 4), rat(1, 10))] {
        let defects = SphereElement::relation_defects(&q, &c).unwrap();
        assert_eq!(defects.len(), 5);
        for (name, d) in &defects {
            assert!(d.is_zero(), "sphere relation defect {name}");
        }
        for leg in [Leg::Plus, Leg::Minus] {
            assert!(
                hop_amplitude_sq(&q, &c, leg, 0).is_zero(),
                "vacuum amplitude on {leg:?}"
            );
        }
        let report = sphere_boundedness_certificates(&q, &c, 8).unwrap();
        assert!(report.passed(), "boundedness at q = {q}, c = {c}");
        assert!(report.shift_number_exact);
    }

    let cert = sphere_index_pairing(12, SphereProjection::VacuumMinus, false).unwrap();
    assert_eq!(cert.windows, (12, 24));
    assert_eq!(cert.index, -1);
    println!("criterion 8: PASS (relations and vacuum amplitude exact at both parameter pairs, certificates bounded, index -1 stabilized)");
}

#[test]
fn criterion_09_leibniz_rule_and_vanishing_certificates() {
    let q = q_half();
    let grid = monomial_grid(&q, 2);
    for a in &grid {
        for b in &grid {
            let lhs = differential(&a.mul(b).unwrap());
            let rhs = differential(a)
                .right_mul(b)
                .unwrap()
                .add(&differential(b).left_mul(a).unwrap())
                .unwrap();
            assert!(lhs.sub(&rhs).unwrap().is_zero(), "Leibniz rule on the grid");
        }
    }

    let certs = higher_form_vanishing_check(&q, &[8, 16]).unwrap();
    assert!(!certs.is_empty());
    for cert in &certs {
        assert!(cert.passed(), "vanishing certificate {}", cert.label);
    }
    println!(
        "criterion 9: PASS (2025 Leibniz identities exact, {} vanishing certificates decay by factor 2)",
        certs.len()
    );
}

#[test]
fn criterion_10_square_integrable_calculus() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..20 {
        let k = rng.gen_range(1..=3usize);
        let word: Vec<i64> = (0..=k).map(|_| rng.gen_range(-4..=4)).collect();
        assert!(power_reduction_relation(&word).unwrap().kernel_membership());
        let r = rng.gen_range(-4..=4);
        assert!(delta_power_relation(r, k).unwrap().kernel_membership());
        if k >= 2 {
            let r2 = if r == -1 { 0 } else { r };
            assert!(antiderivative_relation(r2, k).unwrap().kernel_membership());
        }
    }

    let mut positive = 0usize;
    for t in 0..100 {
        let degree = t % 3;
        let mut form = CircleForm::zero(degree);
        for _ in 0..3 {
            let word: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-3..=3)).collect();
            let coeff = rat_int(rng.gen_range(-4..=4));
            form = form
                .add(&CircleForm::monomial(&word, coeff).unwrap())
                .unwrap();
        }
        let g = form.inner_product(&form).unwrap();
        assert!(g >= Rat::zero(), "negative self-pairing");
        assert_eq!(g, form.inner_product_via_constant_term(&form).unwrap());
        positive += 1;
    }
    assert_eq!(positive, 100);

    let q = q_half();
    for n in -8..=8i64 {
        let diff = circle_differential(&LaurentPoly::z_pow(n));
        assert_eq!(diff.coeff(n), rat_int(n), "mode {n}");
        assert_eq!(diff.terms().count(), usize::from(n != 0));

        if n.abs() <= 5 {
            let a = AlgebraElement::monomial(&q, n as i32, 0, 0, Rat::one()).unwrap();
            let lit = l2_differential(&a, DifferentialMode::Literal);
            let quo = l2_differential(&a, DifferentialMode::Quotiented);
            assert!(lit.sub(&quo).is_zero(), "mode disagreement at {n}");
        }
    }
    println!("criterion 10: PASS (relation families null, 100 nonnegative self-pairings, modes scale by their degree in both readings)");
}

#[test]
fn criterion_11_verify_runs_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_suq2");
    let root = tempfile::tempdir().unwrap();
    let dirs = [root.path().join("first"), root.path().join("second")];
    for dir in &dirs {
        let out = std::process::Command::new(bin)
            .args(["verify", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "verify failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut names: Vec<String> = std::fs::read_dir(&dirs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 7, "expected one report per suite");
    for name in &names {
        let first = std::fs::read(dirs[0].join(name)).unwrap();
        let second = std::fs::read(dirs[1].join(name)).unwrap();
        assert_eq!(first, second, "report {name} differs between runs");
    }
    println!("criterion 11: PASS (two default verify runs, 7 reports, byte-identical)");
}
