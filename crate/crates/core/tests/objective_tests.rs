//! Objective wiring: oracle sweep, caching, grid geometry and the volume file format.

use proptest::prelude::*;

use spectune::objective::{
    desk_sphere_sinograms, grid_oracle, GridDomain, ObjectiveContext, DESK_ANGLES, DESK_SIZE,
    DESK_SLICES, OMEGA_MAX, OMEGA_MIN, RHO_MAX, RHO_MIN,
};
use spectune::pique::{pique_score, PiqueConfig};
use spectune::tomo::{fbp, radon, shepp_logan, FilterParams, Volume};
use spectune::volume_io::{decode_volume, encode_volume, parse_key_values, HEADER_LEN};
use spectune::Error;

/// Mean slice PIQUE computed one slice at a time, rounding through f32 like stored volumes.
fn direct_mean_pique(sinos: &[spectune::tomo::Sinogram], size: usize, p: FilterParams) -> f64 {
    let cfg = PiqueConfig::default();
    let total: f64 = sinos
        .iter()
        .map(|s| {
            let rec = fbp(s, p, size).unwrap().map(|v| v as f32 as f64);
            pique_score(&rec, &cfg).unwrap()
        })
        .sum();
    total / sinos.len() as f64
}

#[test]
fn coarse_oracle_matches_a_plain_double_loop() {
    let sinos = desk_sphere_sinograms(7).unwrap();
    assert_eq!(sinos.len(), DESK_SLICES);
    assert!(sinos.iter().all(|s| s.num_angles() == DESK_ANGLES));
    let ctx = ObjectiveContext::new(sinos.clone(), DESK_SIZE, PiqueConfig::default()).unwrap();
    let m = 4;
    let table = grid_oracle(&ctx, m).unwrap();
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..m {
        for j in 0..m {
            let rho = RHO_MIN + (RHO_MAX - RHO_MIN) * i as f64 / (m - 1) as f64;
            let w0 = OMEGA_MIN + (OMEGA_MAX - OMEGA_MIN) * j as f64 / (m - 1) as f64;
            let want = direct_mean_pique(&sinos, DESK_SIZE, FilterParams::new(rho, w0).unwrap());
            let got = table.get(i, j);
            assert!((got - want).abs() <= 1e-9, "({i},{j}): {got} vs {want}");
            if want < best.0 {
                best = (want, i, j);
            }
        }
    }
    assert_eq!(table.best_pique(), table.get(best.1, best.2));
    assert!(table.range() >= 0.0);
}

#[test]
fn desk_data_is_deterministic_per_seed() {
    let a = desk_sphere_sinograms(3).unwrap();
    let b = desk_sphere_sinograms(3).unwrap();
    let c = desk_sphere_sinograms(4).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.data() == y.data()));
    assert!(a.iter().zip(&c).any(|(x, y)| x.data() != y.data()));
}

#[test]
fn cache_is_transparent() {
    let sino = radon(&shepp_logan(48).unwrap(), 40).unwrap();
    let warm = ObjectiveContext::new(vec![sino.clone(); 2], 48, PiqueConfig::default()).unwrap();
    let params = [(2.0, 0.3), (7.5, 0.9), (2.0, 0.3), (4.0, 0.55)];
    for &(r, w) in &params {
        warm.value(FilterParams::new(r, w).unwrap()).unwrap();
    }
    assert_eq!(warm.reconstructions(), 3);
    assert_eq!(warm.cached_len(), 3);
    for &(r, w) in &params {
        let p = FilterParams::new(r, w).unwrap();
        let cold =
            ObjectiveContext::new(vec![sino.clone(); 2], 48, PiqueConfig::default()).unwrap();
        assert_eq!(
            warm.value(p).unwrap().to_bits(),
            cold.value(p).unwrap().to_bits()
        );
    }
    assert_eq!(warm.reconstructions(), 3);
}

#[test]
fn out_of_domain_parameters_are_rejected() {
    let sino = radon(&shepp_logan(32).unwrap(), 16).unwrap();
    let ctx = ObjectiveContext::new(vec![sino], 32, PiqueConfig::default()).unwrap();
    assert!(ctx.value_at(&[0.5, 0.5]).is_err());
    assert!(ctx.value_at(&[5.0, 1.5]).is_err());
    assert!(ctx.value_at(&[5.0]).is_err());
    assert_eq!(ctx.reconstructions(), 0);
}

#[test]
fn truncated_volume_reports_the_offset() {
    let vol = Volume::new((2, 3, 1), vec![1.0; 6]).unwrap();
    let bytes = encode_volume(&vol);
    assert_eq!(&bytes[..6], b"SPVOL1");
    assert_eq!(&bytes[6..HEADER_LEN], &[2, 0, 0, 0, 3, 0, 0, 0, 1, 0, 0, 0]);
    match decode_volume(&bytes[..bytes.len() - 2]) {
        Err(Error::Format { offset, .. }) => assert_eq!(offset as usize, bytes.len() - 2),
        other => panic!("expected a format error, got {other:?}"),
    }
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(
        decode_volume(&bad),
        Err(Error::Format { offset: 0, .. })
    ));
}

#[test]
fn meta_parsing_reports_the_line_offset() {
    let ok = parse_key_values("# comment\nkind=phantom\n\nsize = 64\n").unwrap();
    assert_eq!(
        ok,
        vec![
            ("kind".into(), "phantom".into()),
            ("size".into(), "64".into())
        ]
    );
    match parse_key_values("kind=phantom\nbroken line\n") {
        Err(Error::Format { offset, .. }) => assert_eq!(offset, 13),
        other => panic!("expected a format error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_index_roundtrips(m in 2usize..1200, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let d = GridDomain::new(m).unwrap();
        let (i, j) = (((m - 1) as f64 * a) as usize, ((m - 1) as f64 * b) as usize);
        let k = d.index(i, j);
        prop_assert_eq!(d.coords(k), (i, j));
        let p = d.point(k);
        prop_assert_eq!(p, [d.rho(i), d.omega(j)]);
        prop_assert!((RHO_MIN..=RHO_MAX).contains(&p[0]));
        prop_assert!((OMEGA_MIN..=OMEGA_MAX).contains(&p[1]));
    }

    #[test]
    fn volume_encoding_roundtrips(
        x in 1usize..6, y in 1usize..6, z in 1usize..4,
        seed in prop::collection::vec(-1.0e6..1.0e6f32, 120),
    ) {
        let data: Vec<f32> = seed.into_iter().take(x * y * z).collect();
        let vol = Volume::new((x, y, z), data).unwrap();
        let bytes = encode_volume(&vol);
        prop_assert_eq!(bytes.len(), HEADER_LEN + 4 * x * y * z);
        let back = decode_volume(&bytes).unwrap();
        prop_assert_eq!(back.dims(), vol.dims());
        prop_assert_eq!(back.voxels(), vol.voxels());
    }
}
