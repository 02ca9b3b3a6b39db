//! Two-mode closed forms checked against direct 4×4 linear algebra.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use proptest::prelude::*;
use sqcc_core::gaussian::{conditional_after_heterodyne, entropy_of_cm, symplectic_eigenvalues};
use sqcc_core::keyrate::holevo_bound;
use sqcc_core::{post_selected_pipeline, ChannelNoise, ProtocolParams, TwoModeCm};

fn full_cm(cm: &TwoModeCm) -> Matrix4<f64> {
    let (a, b, c) = (cm.a, cm.b, cm.c);
    Matrix4::new(
        a, 0.0, c, 0.0, //
        0.0, a, 0.0, -c, //
        c, 0.0, b, 0.0, //
        0.0, -c, 0.0, b,
    )
}

fn omega() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Symplectic eigenvalues as square roots of the spectrum of the symmetric
/// matrix `σ^{1/2} Ωᵀ σ Ω σ^{1/2}`, sorted descending (each appears twice).
fn oracle_spectrum(cm: &TwoModeCm) -> (f64, f64) {
    let s = full_cm(cm);
    let eig = SymmetricEigen::new(s);
    let sqrt_d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    let root = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_d) * eig.eigenvectors.transpose();
    let om = omega();
    let m = root * om.transpose() * s * om * root;
    let m = 0.5 * (m + m.transpose());
    let mut nu: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    nu.sort_by(|x, y| y.partial_cmp(x).unwrap());
    (0.5 * (nu[0] + nu[1]), 0.5 * (nu[2] + nu[3]))
}

fn oracle_g(x: f64) -> f64 {
    if x <= 1.0 + 1e-9 {
        return 0.0;
    }
    let h = |y: f64| if y > 0.0 { y * y.log2() } else { 0.0 };
    h((x + 1.0) / 2.0) - h((x - 1.0) / 2.0)
}

/// General Gaussian conditioning of mode A on heterodyne of mode B:
/// `σ_A - σ_C (σ_B + 𝕀)⁻¹ σ_Cᵀ`, returned as its symplectic eigenvalue.
fn oracle_conditional(cm: &TwoModeCm) -> f64 {
    let sa = Matrix2::new(cm.a, 0.0, 0.0, cm.a);
    let sb = Matrix2::new(cm.b, 0.0, 0.0, cm.b);
    let sc = Matrix2::new(cm.c, 0.0, 0.0, -cm.c);
    let cond = sa - sc * (sb + Matrix2::identity()).try_inverse().unwrap() * sc.transpose();
    cond.determinant().sqrt()
}

/// Physical states from one arm of a TMSV sent through a thermal-loss
/// channel: `a = V`, `b = T V + (1-T) W`, `c = √(T(V²-1))`, optionally with
/// the modes swapped.
fn physical_cm() -> impl Strategy<Value = TwoModeCm> {
    (1.0f64..60.0, 1e-4f64..1.0, 1.0f64..20.0, any::<bool>()).prop_map(|(v, t, w, swap)| {
        let cm = TwoModeCm::new(v, t * v + (1.0 - t) * w, (t * (v * v - 1.0)).sqrt());
        if swap {
            TwoModeCm::new(cm.b, cm.a, cm.c)
        } else {
            cm
        }
    })
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_spectrum_matches_oracle(cm in physical_cm()) {
        let s = symplectic_eigenvalues(&cm).unwrap();
        let (l1, l2) = oracle_spectrum(&cm);
        prop_assert!(close(s.lambda1, l1), "{cm:?}: {} vs {l1}", s.lambda1);
        prop_assert!(close(s.lambda2, l2), "{cm:?}: {} vs {l2}", s.lambda2);
        let want = oracle_g(l1) + oracle_g(l2);
        prop_assert!(close(entropy_of_cm(&cm).unwrap(), want));
    }

    #[test]
    fn heterodyne_conditioning_matches_oracle(cm in physical_cm()) {
        let v = conditional_after_heterodyne(&cm).unwrap();
        prop_assert!(close(v, oracle_conditional(&cm)));
    }
}

#[test]
fn post_selected_matrix_at_41_km_matches_oracle() {
    let p = ProtocolParams {
        v_mod: 9.0,
        displacement: 60.0,
        transmittance: 10f64.powf(-0.82),
        noise: ChannelNoise::Excess(0.05),
        eta: 0.95,
        v_el: 0.01,
        beta: 0.95,
    };
    let ps = post_selected_pipeline(&p, 0.25).unwrap();
    for cm in [ps.data_cm, ps.eve_cm] {
        let (l1, l2) = oracle_spectrum(&cm);
        let joint = oracle_g(l1) + oracle_g(l2);
        let want = joint - oracle_g(oracle_conditional(&cm));
        assert!(close(holevo_bound(&cm).unwrap(), want));
    }
}
