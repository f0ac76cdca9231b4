//! Desk-scale invariant suite behind `boltzmann selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{
    angle_of, derive_params, empirical_rotation_number, rotation_number, uniformize, AngleCoord,
    RealLocusClass,
};
use crate::elliptic::{complete_k, jacobi_real, Modulus};
use crate::kepler::{conserved_quantities, phase_from_config, reflect_at_wall, Branch, PhaseState};
use crate::periodicity::{find_periodic_locus, period3_residual, period3_scale, poncelet_check};
use crate::poincare::{
    involution_i, involution_j, iterate_orbit, sample_level_set, IterateOptions,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = Result<String, String>;

/// One parameter point per smooth class.
const REFERENCE: [(f64, f64); 4] = [(1.5, -0.2), (2.5, -0.1), (-2.5, 1.5), (0.5, 0.4)];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn wrap_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    (d - d.round()).abs()
}

fn classification() -> Check {
    let cases = [
        ((1.5, -0.2), RealLocusClass::I),
        ((2.5, -0.1), RealLocusClass::IIplus),
        ((-2.5, 1.5), RealLocusClass::IIminus),
        ((1.0, -0.5), RealLocusClass::DegenerateTangent),
        ((2.0, 0.1), RealLocusClass::NodalD),
        ((3.0, -0.45), RealLocusClass::Empty),
        ((-1.5, 0.2), RealLocusClass::NegativeAngularMomentumSide),
    ];
    for ((d, e), want) in cases {
        let got = derive_params(d, e).class;
        ensure(got == want, || {
            format!("({d}, {e}) classified {got}, expected {want}")
        })?;
    }
    let p = derive_params(1.75, -5.0 / 24.0);
    let err = (p.r - 2.0 / 3.0).abs()
        + (p.k2 + 5.0 / 27.0).abs()
        + (p.s0 - 3.0).abs()
        + (p.c2 - 3.0).abs();
    ensure(err < 1e-13, || {
        format!("reference parameters off by {err:e}")
    })?;
    Ok(format!("{} fixtures", cases.len() + 1))
}

fn special_functions(rng: &mut ChaCha8Rng) -> Check {
    let k = complete_k(Modulus::new(0.5).unwrap()).map_err(|e| e.to_string())?;
    ensure((k - 1.854_074_677_301_372).abs() < 1e-14, || {
        format!("K(1/2) = {k}")
    })?;
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let m = Modulus::new(rng.gen_range(-3.0..0.999)).unwrap();
        let u = rng.gen_range(-10.0..10.0);
        let j = jacobi_real(u, m);
        worst = worst
            .max((j.sn * j.sn + j.cn * j.cn - 1.0).abs())
            .max((j.dn * j.dn + m.k2() * j.sn * j.sn - 1.0).abs());
    }
    ensure(worst < 1e-11, || {
        format!("Jacobi identity defect {worst:e}")
    })?;
    Ok(format!("identity defect {worst:.1e}"))
}

fn kepler(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = PhaseState::new(
            rng.gen_range(-3.0..3.0),
            1.0,
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let a = conserved_quantities(s).map_err(|e| e.to_string())?;
        let b = conserved_quantities(reflect_at_wall(s).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let scale = 1.0 + a.l * a.l + a.a1 * a.a1 + a.a2 * a.a2;
        worst = worst
            .max(a.classical_defect().abs() / scale)
            .max((a.e - b.e).abs())
            .max((a.d - b.d).abs() / scale);
    }
    ensure(worst < 1e-11, || format!("defect {worst:e}"))?;
    let p = derive_params(1.5, -0.2);
    for c in sample_level_set(&p, 100, 11).map_err(|e| e.to_string())? {
        let q = conserved_quantities(
            phase_from_config(c, &p, Branch::Outgoing).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let err = (q.e - p.e)
            .abs()
            .max((q.a1 - c.a1).abs())
            .max((q.a2 - c.a2).abs());
        ensure(err < 1e-10, || format!("phase roundtrip defect {err:e}"))?;
    }
    Ok(format!("defect {worst:.1e}"))
}

fn involutions(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for (d, e) in REFERENCE {
        let p = derive_params(d, e);
        for c in sample_level_set(&p, 300, seed).map_err(|e| e.to_string())? {
            let (ci, _) = involution_i(c, &p).map_err(|e| e.to_string())?;
            let (cii, _) = involution_i(ci, &p).map_err(|e| e.to_string())?;
            let cjj = involution_j(involution_j(c, &p), &p);
            worst = worst.max(cii.distance(&c)).max(cjj.distance(&c));
        }
    }
    ensure(worst < 1e-9, || format!("defect {worst:e}"))?;
    Ok(format!("defect {worst:.1e}"))
}

fn conservation(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for (d, e) in REFERENCE {
        let p = derive_params(d, e);
        let c0 = sample_level_set(&p, 1, seed).map_err(|e| e.to_string())?[0];
        let orbit =
            iterate_orbit(c0, &p, 1000, &IterateOptions::default()).map_err(|e| e.to_string())?;
        for w in orbit.points.windows(2) {
            let dd = w[1].measured_d(&p) - w[0].measured_d(&p);
            let de = w[1].energy_defect(&p) - w[0].energy_defect(&p);
            worst = worst.max(dd.abs()).max(de.abs());
        }
    }
    ensure(worst < 1e-8, || format!("per-step drift {worst:e}"))?;
    Ok(format!("per-step drift {worst:.1e}"))
}

fn uniformization(rng: &mut ChaCha8Rng) -> Check {
    let mut res: f64 = 0.0;
    let mut conj: f64 = 0.0;
    for (d, e) in REFERENCE {
        let p = derive_params(d, e);
        let rot = rotation_number(&p).map_err(|e| e.to_string())?;
        for k in 0..100 {
            let eps = if p.regime().unwrap().is_bipartite() {
                (k % 2) as u8
            } else {
                0
            };
            let a = AngleCoord::new(rng.gen(), eps);
            let Ok(c) = uniformize(a, &p) else { continue };
            res = res.max(c.max_residual(&p));
            let back = angle_of(c, &p).map_err(|e| e.to_string())?;
            ensure(back.eps == a.eps, || {
                format!("component lost at ({d}, {e})")
            })?;
            let t = crate::poincare::map_t(c, &p)
                .map_err(|e| e.to_string())?
                .point;
            let at = angle_of(t, &p).map_err(|e| e.to_string())?;
            let want_eps = a.eps ^ u8::from(rot.flips_component);
            ensure(at.eps == want_eps, || {
                format!("component bookkeeping at ({d}, {e})")
            })?;
            conj = conj.max(wrap_diff(at.theta, a.theta + rot.alpha));
        }
    }
    ensure(res < 1e-10 && conj < 1e-7, || {
        format!("residual {res:e}, conjugacy {conj:e}")
    })?;
    Ok(format!("residual {res:.1e}, conjugacy {conj:.1e}"))
}

fn rotation(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for (d, e) in REFERENCE {
        let p = derive_params(d, e);
        let alpha = rotation_number(&p).map_err(|e| e.to_string())?.alpha;
        let c0 = sample_level_set(&p, 1, seed).map_err(|e| e.to_string())?[0];
        let emp = empirical_rotation_number(&p, c0, 10_000).map_err(|e| e.to_string())?;
        worst = worst.max(wrap_diff(alpha, emp));
    }
    ensure(worst < 1e-6, || format!("analytic vs empirical {worst:e}"))?;
    Ok(format!("analytic vs empirical {worst:.1e}"))
}

fn poncelet(seed: u64) -> Check {
    let p = derive_params(1.75, -5.0 / 24.0);
    let rep = poncelet_check(&p, 100, 60, 1e-8, seed).map_err(|e| e.to_string())?;
    ensure(rep.detected == Some(3) && rep.method_agreement, || {
        format!("{rep:?}")
    })?;
    let q = derive_params(1.5, -0.2);
    let gen = poncelet_check(&q, 20, 50, 1e-8, seed).map_err(|e| e.to_string())?;
    ensure(gen.detected.is_none() && gen.method_agreement, || {
        format!("{gen:?}")
    })?;
    Ok(format!("period 3 closing defect {:.1e}", rep.residual))
}

fn period_locus() -> Check {
    let e = -5.0 / 24.0;
    let roots = find_periodic_locus(e, 3, (0.0, 2.0), 1e-12);
    ensure(roots.iter().any(|d| (d - 1.75).abs() < 1e-8), || {
        format!("roots {roots:?}")
    })?;
    for d in &roots {
        let rel = period3_residual(*d, e).abs() / period3_scale(*d, e);
        ensure(rel < 1e-6, || format!("root {d} leaves polynomial {rel:e}"))?;
    }
    Ok(format!("{} root(s)", roots.len()))
}

/// Runs all suites in a fixed order; output depends only on `seed`.
pub fn run_selftest(seed: u64, force_fail: bool) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    let mut record = |name: &'static str, check: Check| {
        let (passed, detail) = match check {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        results.push(SuiteResult {
            name,
            passed,
            detail,
        });
    };
    record("classification", classification());
    record("special", special_functions(&mut rng));
    record("kepler", kepler(&mut rng));
    record("involutions", involutions(seed));
    record("conservation", conservation(seed));
    record("uniformization", uniformization(&mut rng));
    record("rotation", rotation(seed));
    record("poncelet", poncelet(seed));
    record("period-locus", period_locus());
    if force_fail {
        record("forced", Err("failure requested".into()));
    }
    results
}
