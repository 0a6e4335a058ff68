//! The seven certificate suites behind `verify`.
//!
//! Each suite reruns a family of identities from the core crate at the
//! configured parameters and reports one named line per check. Suites are
//! independent, so [`run_suites`] executes them on parallel threads; the
//! result vector keeps the canonical order regardless of finish order.

use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, SuiteName};
use crate::report::{fmt_f64, fmt_profile, SuiteReport};

use suq2_core::algebra::AlgebraElement;
use suq2_core::connes::{differential, higher_form_vanishing_check};
use suq2_core::dirac::{
    boundedness_gate, direct_commutator, four_term_commutator, growth_audit,
    multiplicity_table_stabilized, summability_profile, DiracSpec, SummabilityTrend,
};
use suq2_core::fredholm::{
    canonical_pairing, multiplicity_pairing, sign_pairing, u_pairing, ColumnProjection,
    IndexCertificate, PFamily,
};
use suq2_core::l2::{
    antiderivative_relation, circle_differential, degree_two_null_certificate,
    delta_power_relation, l2_differential, power_reduction_relation, sigma_pushforward_check,
    CircleForm, DifferentialMode,
};
use suq2_core::podles::{
    hop_amplitude_sq, sphere_boundedness_certificates, sphere_calculus, sphere_index_pairing, Leg,
    SphereElement, SphereProjection,
};
use suq2_core::represent::{
    homomorphism_defect_is_zero, relation_matrix_defects, star_defect_is_zero,
};
use suq2_core::scalar::{rat_int, Scalar};
use suq2_core::{PlaneWindow, Rat};

use suq2_core::algebra::LaurentPoly;
use suq2_core::connes::UniversalForm;

/// Seed for every randomized sample in the suites. Fixed so two runs over
/// the same configuration walk the same elements and write the same bytes.
const SUITE_SEED: u64 = 0x5eed_0001;

pub fn run_suite(name: SuiteName, cfg: &RunConfig) -> SuiteReport {
    match name {
        SuiteName::Algebra => algebra_suite(cfg),
        SuiteName::Representation => representation_suite(cfg),
        SuiteName::Dirac => dirac_suite(cfg),
        SuiteName::Fredholm => fredholm_suite(cfg),
        SuiteName::Calculus => calculus_suite(cfg),
        SuiteName::L2 => l2_suite(cfg),
        SuiteName::Sphere => sphere_suite(cfg),
    }
}

/// Runs the configured suites concurrently and returns reports in the
/// canonical suite order. Writing is left to the caller, serialized.
pub fn run_suites(cfg: &RunConfig) -> Vec<SuiteReport> {
    let order = cfg.suite_order();
    let mut slots: Vec<Option<SuiteReport>> = order.iter().map(|_| None).collect();
    std::thread::scope(|scope| {
        for (slot, &name) in slots.iter_mut().zip(&order) {
            scope.spawn(move || *slot = Some(run_suite(name, cfg)));
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("suite thread filled its slot"))
        .collect()
}

fn fmt_index_cert(cert: &IndexCertificate) -> String {
    format!(
        "index {} at windows ({}, {}), kernel/cokernel ({}, {}) then ({}, {})",
        cert.index,
        cert.windows.0,
        cert.windows.1,
        cert.counts.0.kernel,
        cert.counts.0.cokernel,
        cert.counts.1.kernel,
        cert.counts.1.cokernel,
    )
}

fn algebra_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("algebra", cfg);
    let q = &cfg.q;

    match AlgebraElement::<Rat>::relation_defects(q) {
        Ok(defects) => {
            let bad: Vec<&str> = defects
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(n, _)| *n)
                .collect();
            report.push(
                "defining relations normal-order to zero",
                bad.is_empty(),
                if bad.is_empty() {
                    format!("{} relations checked", defects.len())
                } else {
                    format!("nonzero defects: {}", bad.join(", "))
                },
            );
        }
        Err(e) => report.push_error("defining relations normal-order to zero", e),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let sample = |rng: &mut ChaCha8Rng| AlgebraElement::random(q, rng, 2, 2, 3).unwrap();

    let trials = 24usize;
    let mut assoc_ok = 0usize;
    let mut herm_ok = 0usize;
    for _ in 0..trials {
        let (a, b, c) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        if left.sub(&right).unwrap().is_zero() {
            assoc_ok += 1;
        }
        let star = a.mul(&b).unwrap().adjoint();
        if star
            .sub(&b.adjoint().mul(&a.adjoint()).unwrap())
            .unwrap()
            .is_zero()
        {
            herm_ok += 1;
        }
    }
    report.push(
        "multiplication is associative on random products",
        assoc_ok == trials,
        format!("{assoc_ok}/{trials} random triples"),
    );
    report.push(
        "involution reverses random products",
        herm_ok == trials,
        format!("{herm_ok}/{trials} random pairs"),
    );

    let mut invol_ok = true;
    for _ in 0..trials {
        let a = sample(&mut rng);
        invol_ok &= a.adjoint().adjoint().sub(&a).unwrap().is_zero();
    }
    report.push(
        "involution is an involution",
        invol_ok,
        format!("{trials} random elements"),
    );
    report
}

fn representation_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("representation", cfg);
    let q = &cfg.q;
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);

    for &m in &cfg.windows {
        let w = PlaneWindow::square(m);

        match relation_matrix_defects(q, w) {
            Ok(checks) => {
                let bad: Vec<&str> = checks
                    .iter()
                    .filter(|(_, ok)| !ok)
                    .map(|(n, _)| *n)
                    .collect();
                report.push(
                    &format!("matrix relations hold on the window {m} interior"),
                    bad.is_empty(),
                    if bad.is_empty() {
                        format!("{} relations checked", checks.len())
                    } else {
                        format!("violated: {}", bad.join(", "))
                    },
                );
            }
            Err(e) => report.push_error(
                &format!("matrix relations hold on the window {m} interior"),
                e,
            ),
        }

        let pairs = 8usize;
        let mut hom_ok = 0usize;
        let mut star_ok = 0usize;
        for _ in 0..pairs {
            let a = AlgebraElement::random(q, &mut rng, 1, 1, 2).unwrap();
            let b = AlgebraElement::random(q, &mut rng, 1, 1, 2).unwrap();
            match homomorphism_defect_is_zero(&a, &b, w) {
                Ok(true) => hom_ok += 1,
                Ok(false) => {}
                Err(e) => {
                    report.push_error(&format!("products are preserved on window {m}"), e);
                    break;
                }
            }
            if star_defect_is_zero(&a, w) {
                star_ok += 1;
            }
        }
        report.push(
            &format!("products are preserved on window {m}"),
            hom_ok == pairs,
            format!("{hom_ok}/{pairs} random pairs on the interior"),
        );
        report.push(
            &format!("adjoints are preserved on window {m}"),
            star_ok == pairs,
            format!("{star_ok}/{pairs} random elements, full window"),
        );
    }
    report
}

fn dirac_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("dirac", cfg);
    let q = &cfg.q;
    let scan = cfg.scan();
    let spec = DiracSpec::generic();
    let w = PlaneWindow::square(scan);

    let mut grid_ok = true;
    let mut grid_count = 0usize;
    for i in -1..=1i32 {
        for j in 0..=1u32 {
            for k in 0..=1u32 {
                let a = AlgebraElement::monomial(q, i, j, k, Rat::one()).unwrap();
                let ft = four_term_commutator(&a, w);
                let dir = direct_commutator(&spec, &a, w);
                grid_ok &= ft.eq_on_interior(&dir).map(|r| r.is_ok()).unwrap_or(false);
                grid_count += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    for _ in 0..4 {
        let a = AlgebraElement::random(q, &mut rng, 2, 2, 3).unwrap();
        let ft = four_term_commutator(&a, w);
        let dir = direct_commutator(&spec, &a, w);
        grid_ok &= ft.eq_on_interior(&dir).map(|r| r.is_ok()).unwrap_or(false);
        grid_count += 1;
    }
    report.push(
        "assembled commutators match direct commutators",
        grid_ok,
        format!("{grid_count} elements on the window {scan} interior"),
    );

    match boundedness_gate(&spec, scan) {
        Ok(cert) => report.push(
            "commutator differences stay bounded for the equivariant candidate",
            true,
            format!(
                "first-leg maxima {:?}, second-leg maxima {:?}",
                cert.first_leg
                    .maxima
                    .iter()
                    .map(|x| fmt_f64(Scalar::to_f64(x)))
                    .collect::<Vec<_>>(),
                cert.second_leg
                    .maxima
                    .iter()
                    .map(|x| fmt_f64(Scalar::to_f64(x)))
                    .collect::<Vec<_>>(),
            ),
        ),
        Err(fail) => report.push(
            "commutator differences stay bounded for the equivariant candidate",
            false,
            format!("{} grows: {:?}", fail.profile.family, fail.profile.maxima),
        ),
    }

    match boundedness_gate(&DiracSpec::square_first_leg(), scan) {
        Err(fail) => report.push(
            "squared candidate is rejected with a growing witness",
            true,
            format!(
                "{} maxima {:?} at witnesses {:?}",
                fail.profile.family,
                fail.profile
                    .maxima
                    .iter()
                    .map(|x| fmt_f64(Scalar::to_f64(x)))
                    .collect::<Vec<_>>(),
                fail.profile.witnesses,
            ),
        ),
        Ok(_) => report.push(
            "squared candidate is rejected with a growing witness",
            false,
            "gate accepted the squared candidate",
        ),
    }

    match growth_audit(&spec, scan) {
        Ok(_) => report.push(
            "eigenvalue growth is at most linear",
            true,
            format!("scan radii {scan}, {}, {}", 2 * scan, 4 * scan),
        ),
        Err(fail) => report.push(
            "eigenvalue growth is at most linear",
            false,
            format!("witness {:?}", fail.profile.witnesses),
        ),
    }

    match multiplicity_table_stabilized(&spec, &rat_int(6), 14) {
        Ok(table) => {
            let law_ok = table.iter().all(|(v, count)| {
                let n = v.to_integer();
                let expected = if *v >= Rat::zero() {
                    (&n + 1u32).to_string()
                } else {
                    n.magnitude().to_string()
                };
                count.to_string() == expected
            });
            report.push(
                "multiplicities follow the level law",
                law_ok,
                format!("{} stabilized levels inside |d| <= 6", table.len()),
            );
        }
        Err(e) => report.push_error("multiplicities follow the level law", e),
    }

    let lams = [rat_int(8), rat_int(16), rat_int(32)];
    match (
        summability_profile(&spec, &rat_int(1), &lams, 66),
        summability_profile(&spec, &rat_int(3), &lams, 66),
    ) {
        (Ok(div), Ok(conv)) => {
            report.push(
                "trace sums diverge at p = 1 and converge at p = 3",
                div.trend == SummabilityTrend::Divergent
                    && conv.trend == SummabilityTrend::Convergent,
                format!(
                    "p = 1 partial sums {}, p = 3 partial sums {}",
                    fmt_profile(&div.partial_sums),
                    fmt_profile(&conv.partial_sums),
                ),
            );
        }
        (a, b) => {
            let msg = a.err().map(|e| e.to_string()).unwrap_or_default()
                + &b.err().map(|e| e.to_string()).unwrap_or_default();
            report.push(
                "trace sums diverge at p = 1 and converge at p = 3",
                false,
                msg,
            );
        }
    }
    report
}

fn fredholm_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("fredholm", cfg);
    let m = cfg.windows.first().copied().unwrap_or(8).max(8);

    for (family, expected) in [
        (PFamily::P2, 1i64),
        (PFamily::P1, -1),
        (PFamily::P3, 0),
        (PFamily::P4, 0),
    ] {
        let p = ColumnProjection::new(family, 2, [0, 1]).unwrap();
        let name = format!("flux pairing with {:?} equals {expected}", family);
        match u_pairing(&p, m) {
            Ok(cert) => {
                let ok = cert.index == expected;
                report.push(&name, ok, fmt_index_cert(&cert));
            }
            Err(e) => report.push_error(&name, e),
        }
    }

    match sign_pairing(&DiracSpec::generic(), m) {
        Ok(cert) => report.push(
            "flux pairing with the spectral sign equals 1",
            cert.index == 1,
            fmt_index_cert(&cert),
        ),
        Err(e) => report.push_error("flux pairing with the spectral sign equals 1", e),
    }

    match canonical_pairing(&cfg.q, &DiracSpec::generic(), m) {
        Ok(cert) => report.push(
            "matrix unitary pairs nontrivially with the spectral sign",
            cert.index != 0 && cert.counts.0.index() == cert.counts.1.index(),
            fmt_index_cert(&cert),
        ),
        Err(e) => report.push_error(
            "matrix unitary pairs nontrivially with the spectral sign",
            e,
        ),
    }

    let mut mult_ok = true;
    let mut mult_detail = Vec::new();
    for mult in [-3i64, -2, -1, 1, 2, 3] {
        match multiplicity_pairing(mult, m) {
            Ok(cert) => {
                mult_ok &= cert.index == mult;
                mult_detail.push(format!("{mult} -> {}", cert.index));
            }
            Err(e) => {
                mult_ok = false;
                mult_detail.push(format!("{mult} -> error: {e}"));
            }
        }
    }
    report.push(
        "stacked copies carry their signed count",
        mult_ok,
        mult_detail.join(", "),
    );
    report
}

fn calculus_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("calculus", cfg);
    let q = &cfg.q;
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);

    let trials = 16usize;
    let mut leibniz_ok = 0usize;
    for _ in 0..trials {
        let a = AlgebraElement::random(q, &mut rng, 2, 2, 3).unwrap();
        let b = AlgebraElement::random(q, &mut rng, 2, 2, 3).unwrap();
        let lhs = differential(&a.mul(&b).unwrap());
        let rhs = differential(&a)
            .right_mul(&b)
            .unwrap()
            .add(&differential(&b).left_mul(&a).unwrap())
            .unwrap();
        if lhs.sub(&rhs).unwrap().is_zero() {
            leibniz_ok += 1;
        }
    }
    report.push(
        "differential satisfies the Leibniz rule",
        leibniz_ok == trials,
        format!("{leibniz_ok}/{trials} random pairs, exact"),
    );

    match higher_form_vanishing_check(q, &cfg.windows) {
        Ok(certs) => {
            for cert in &certs {
                report.push(
                    &format!("vanishing certificate: {}", cert.label),
                    cert.passed(),
                    format!(
                        "class {}, followup {}, tails {}",
                        if cert.class_ok { "exact" } else { "WRONG" },
                        if cert.followup_ok { "nonzero" } else { "LOST" },
                        fmt_profile(&cert.profile),
                    ),
                );
            }
        }
        Err(e) => report.push_error("vanishing certificates", e),
    }
    report
}

fn l2_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("l2", cfg);
    let q = &cfg.q;

    let mut family_ok = true;
    let mut family_count = 0usize;
    for r in 1..=4i64 {
        for k in 1..=3usize {
            family_ok &= delta_power_relation(r, k)
                .map(|f| f.kernel_membership())
                .unwrap_or(false);
            family_count += 1;
            if k >= 2 {
                family_ok &= antiderivative_relation(r, k)
                    .map(|f| f.kernel_membership())
                    .unwrap_or(false);
                family_count += 1;
            }
        }
    }
    for word in [[2i64, 3].as_slice(), &[1, -1], &[0, 2], &[3, 1]] {
        family_ok &= power_reduction_relation(word)
            .map(|f| f.kernel_membership())
            .unwrap_or(false);
        family_count += 1;
    }
    report.push(
        "relation families lie in the null space",
        family_ok,
        format!("{family_count} relations checked"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let trials = 32usize;
    let mut pos_ok = 0usize;
    let mut route_ok = 0usize;
    for t in 0..trials {
        let degree = t % 3;
        let mut form = CircleForm::zero(degree);
        for _ in 0..3 {
            let mut word = vec![0i64; degree + 1];
            for slot in word.iter_mut() {
                *slot = (rand::Rng::gen_range(&mut rng, -3..=3i64)).clamp(-3, 3);
            }
            let coeff = rat_int(rand::Rng::gen_range(&mut rng, -4..=4i64));
            form = form
                .add(&CircleForm::monomial(&word, coeff).unwrap())
                .unwrap();
        }
        let g = form.inner_product(&form).unwrap();
        if g >= Rat::zero() {
            pos_ok += 1;
        }
        if g == form.inner_product_via_constant_term(&form).unwrap() {
            route_ok += 1;
        }
    }
    report.push(
        "pairings of forms with themselves are nonnegative",
        pos_ok == trials,
        format!("{pos_ok}/{trials} random forms"),
    );
    report.push(
        "Fourier and constant-term pairings agree",
        route_ok == trials,
        format!("{route_ok}/{trials} random forms, exact"),
    );

    let mut mode_ok = true;
    for n in -4..=4i64 {
        let diff = circle_differential(&LaurentPoly::z_pow(n));
        mode_ok &= diff.coeff(n) == rat_int(n) && diff.terms().count() == usize::from(n != 0);
        let a = AlgebraElement::monomial(q, n as i32, 0, 0, Rat::one()).unwrap();
        let lit = l2_differential(&a, DifferentialMode::Literal);
        let quo = l2_differential(&a, DifferentialMode::Quotiented);
        mode_ok &= lit.sub(&quo).is_zero();
    }
    report.push(
        "differential multiplies each mode by its degree",
        mode_ok,
        "modes -4..=4, both quotient readings agree off the ideal",
    );

    let mut null_ok = true;
    for r in 1..=3i64 {
        null_ok &= degree_two_null_certificate(r).unwrap_or(false);
    }
    report.push(
        "canonical degree-two words are differentials modulo null forms",
        null_ok,
        "r in 1..=3",
    );

    let alpha = AlgebraElement::gen_alpha(q).unwrap();
    let astar = AlgebraElement::gen_alpha_star(q).unwrap();
    let form = UniversalForm::delta(&alpha).right_mul(&astar).unwrap();
    match sigma_pushforward_check(&form, &cfg.windows) {
        Ok(rep) => report.push(
            "self-pairing factors through the circle symbol",
            rep.passed(),
            format!(
                "both routes give {}, discrepancy tails {}",
                suq2_core::scalar::format_rat(&rep.left),
                fmt_profile(&rep.profile),
            ),
        ),
        Err(e) => report.push_error("self-pairing factors through the circle symbol", e),
    }
    report
}

fn sphere_suite(cfg: &RunConfig) -> SuiteReport {
    let mut report = SuiteReport::new("sphere", cfg);
    let (q, c) = (&cfg.q, &cfg.c);

    match SphereElement::relation_defects(q, c) {
        Ok(defects) => {
            let bad: Vec<&str> = defects
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(n, _)| *n)
                .collect();
            report.push(
                "sphere relations normal-order to zero",
                bad.is_empty(),
                if bad.is_empty() {
                    format!("{} relations checked", defects.len())
                } else {
                    format!("nonzero defects: {}", bad.join(", "))
                },
            );
        }
        Err(e) => report.push_error("sphere relations normal-order to zero", e),
    }

    let vac_ok = hop_amplitude_sq(q, c, Leg::Plus, 0).is_zero()
        && hop_amplitude_sq(q, c, Leg::Minus, 0).is_zero();
    report.push(
        "vacuum hop amplitude vanishes symbolically",
        vac_ok,
        "both legs, exact in the quadratic extension",
    );

    match sphere_boundedness_certificates(q, c, cfg.scan()) {
        Ok(rep) => {
            let mut detail = Vec::new();
            for p in rep.weighted_diagonal.iter().chain(rep.hop_deviation.iter()) {
                detail.push(format!(
                    "{}: maxima [{}, {}, {}]",
                    p.family,
                    fmt_f64(p.maxima[0]),
                    fmt_f64(p.maxima[1]),
                    fmt_f64(p.maxima[2]),
                ));
            }
            detail.push(format!(
                "shift-number bracket exact: {}",
                rep.shift_number_exact
            ));
            report.push(
                "commutator ingredients stay bounded",
                rep.passed(),
                detail.join("; "),
            );
        }
        Err(e) => report.push_error("commutator ingredients stay bounded", e),
    }

    let m = cfg.windows.first().copied().unwrap_or(12).max(12);
    for (projection, expected) in [
        (SphereProjection::VacuumMinus, -1i64),
        (SphereProjection::Trivial, 0),
        (SphereProjection::VacuumBoth, 0),
    ] {
        for flipped in [false, true] {
            let name = format!(
                "index of {}{} equals {expected}",
                projection.label(),
                if flipped { " under a phase flip" } else { "" },
            );
            match sphere_index_pairing(m, projection, flipped) {
                Ok(cert) => report.push(&name, cert.index == expected, fmt_index_cert(&cert)),
                Err(e) => report.push_error(&name, e),
            }
        }
    }

    match sphere_calculus(q, c, cfg.scan(), 2, SUITE_SEED) {
        Ok(rep) => {
            let parity_ok = rep
                .parity
                .iter()
                .all(|p| p.pattern_exact && p.cross_block_ok);
            report.push(
                "commutator words respect the grading parity",
                parity_ok,
                format!(
                    "{} sampled words, blocks exact, cross tails decay",
                    rep.parity.len()
                ),
            );
            let wit_ok = rep.witnesses.iter().all(|w| w.value_ok && w.defect_ok);
            let tails: Vec<String> = rep
                .witnesses
                .iter()
                .map(|w| {
                    format!(
                        "degree {}: value {}, defect {}",
                        w.degree,
                        fmt_profile(&w.value_profile),
                        fmt_profile(&w.defect_profile),
                    )
                })
                .collect();
            report.push(
                "junk witnesses vanish with their differentials pinned",
                wit_ok,
                tails.join("; "),
            );
            let class: Vec<String> = rep
                .generator_class
                .iter()
                .map(|(d, v)| format!("z^{d}: {}", fmt_f64(*v)))
                .collect();
            report.push(
                "degree-one band identifies the generating mode",
                rep.generator_class_ok,
                format!(
                    "normalized class [{}], probe gap {}",
                    class.join(", "),
                    fmt_f64(rep.generator_symbol.max_probe_gap),
                ),
            );
        }
        Err(e) => report.push_error("sphere calculus certificates", e),
    }
    report
}
