use causeway::phenomena::ldr::load_ldr_dataset;
use causeway::phenomena::ohm::{generate_ohm_dataset, OhmConstants, OhmRanges, OhmRow};
use causeway::phenomena::quantum::{
    build_entanglement_dataset, correlation, entanglement_table, log_negativity, measure_zz, random_density_matrix,
    state_rng, DensityMatrix,
};
use causeway::phenomena::tides::{load_tide_dataset, read_tide_dataset, KM_PER_AU};
use causeway::phenomena::PhenomenaError;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn fixtures() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ohm_rows_satisfy_the_three_identities(
        seed in any::<u64>(),
        v in (0.1f64..50.0, 0.0f64..50.0),
        l in (0.01f64..5.0, 0.0f64..5.0),
        a in (1e-8f64..1e-5, 0.0f64..1e-5),
        dt in (0.0f64..200.0, 0.0f64..200.0),
    ) {
        let ranges = OhmRanges {
            v: (v.0, v.0 + v.1),
            l: (l.0, l.0 + l.1),
            a: (a.0, a.0 + a.1),
            dt: (dt.0, dt.0 + dt.1),
        };
        let c = OhmConstants::default();
        let t = generate_ohm_dataset(200, &ranges, &c, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(t.names(), ["V", "L", "A", "T", "rho", "R", "I"]);
        let col = |n: &str| t.column(n).unwrap().to_vec();
        let (vv, ll, aa, tt, rho, r, i) = (col("V"), col("L"), col("A"), col("T"), col("rho"), col("R"), col("I"));
        for k in 0..t.n_rows() {
            prop_assert!(rel_close(rho[k], 1.06e-7 * (1.0 + 3.92e-3 * tt[k]), 1e-9));
            prop_assert!(rel_close(r[k], rho[k] * ll[k] / aa[k], 1e-9));
            prop_assert!(rel_close(i[k] * r[k], vv[k], 1e-9));
            prop_assert!(ranges.v.0 <= vv[k] && vv[k] <= ranges.v.1);
            prop_assert!(ranges.dt.0 <= tt[k] && tt[k] <= ranges.dt.1);
        }
    }
}

#[test]
fn ohm_reference_rows() {
    let c = OhmConstants::default();
    let row = OhmRow::compute(2.0, 1.0, c.rho0, 0.0, &c);
    assert_eq!(row.rho, c.rho0);
    assert!((row.r - 1.0).abs() < 1e-15);
    assert!((row.i - 2.0).abs() < 1e-14);
    let bad = OhmRanges {
        l: (0.0, 1.0),
        ..OhmRanges::default()
    };
    assert!(matches!(
        generate_ohm_dataset(3, &bad, &c, &mut ChaCha8Rng::seed_from_u64(0)),
        Err(PhenomenaError::BadRange { .. })
    ));
}

fn random_qubit(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
    let g = Matrix2::from_fn(|_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Trace norm of the partial transpose via singular values, independent of
/// the library's transposition and eigen-decomposition.
fn oracle_log_negativity(rho: &Matrix4<Complex64>) -> f64 {
    let mut pt = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    pt[(2 * a + b, 2 * a2 + b2)] = rho[(2 * a + b2, 2 * a2 + b)];
                }
            }
        }
    }
    let norm: f64 = pt.singular_values().iter().sum();
    norm.log2().max(0.0)
}

#[test]
fn product_states_have_zero_log_negativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let rho = DensityMatrix::product(&random_qubit(&mut rng), &random_qubit(&mut rng)).unwrap();
        assert!(log_negativity(&rho).abs() < 1e-10);
    }
}

#[test]
fn log_negativity_matches_singular_value_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..500 {
        let rho = random_density_matrix(&mut rng);
        let e = log_negativity(&rho);
        assert!((0.0..=1.0).contains(&e));
        assert!((e - oracle_log_negativity(rho.matrix())).abs() < 1e-10);
    }
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let rho = DensityMatrix::werner(p).unwrap();
        assert!((log_negativity(&rho) - oracle_log_negativity(rho.matrix())).abs() < 1e-12);
    }
}

#[test]
fn random_states_are_valid_and_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..200 {
        let rho = random_density_matrix(&mut rng);
        assert!(DensityMatrix::new(*rho.matrix()).is_ok());
    }
    let a = random_density_matrix(&mut ChaCha8Rng::seed_from_u64(5));
    let b = random_density_matrix(&mut ChaCha8Rng::seed_from_u64(5));
    assert_eq!(a, b);
}

#[test]
fn mean_purity_of_ginibre_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let n = 10_000;
    let mean = (0..n).map(|_| random_density_matrix(&mut rng).purity()).sum::<f64>() / n as f64;
    assert!((mean - 8.0 / 17.0).abs() < 0.01, "{mean}");
}

#[test]
fn reference_measurements() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    assert!(measure_zz(&DensityMatrix::bell_phi_plus(), 500, &mut rng)
        .iter()
        .all(|(a, b)| a == b));
    assert!(measure_zz(&DensityMatrix::basis(0, 1), 500, &mut rng)
        .iter()
        .all(|&s| s == (1, -1)));
    let shots = measure_zz(&DensityMatrix::maximally_mixed(), 10_000, &mut rng);
    for outcome in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let f = shots.iter().filter(|&&s| s == outcome).count() as f64 / 10_000.0;
        assert!((f - 0.25).abs() < 0.02, "{outcome:?}: {f}");
    }
}

#[test]
fn correlation_examples() {
    assert_eq!(correlation(&[(1, 1); 10]), 1.0);
    assert_eq!(correlation(&[(1, -1); 10]), -1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let sign = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1 } else { -1 };
    let pairs: Vec<(i8, i8)> = (0..10_000).map(|_| (sign(&mut rng), sign(&mut rng))).collect();
    assert!(correlation(&pairs).abs() <= 0.05);
}

#[test]
fn measurement_average_converges_to_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let shots = 4000;
    let mut inside = 0;
    for _ in 0..200 {
        let rho = random_density_matrix(&mut rng);
        let c = correlation(&measure_zz(&rho, shots, &mut rng));
        if (c - rho.zz_expectation()).abs() <= 3.0 / (shots as f64).sqrt() {
            inside += 1;
        }
    }
    // 3/sqrt(shots) bounds at least three standard deviations.
    assert!(inside >= 198, "{inside}/200");
}

#[test]
fn entanglement_dataset_is_internally_consistent() {
    let seed = 7;
    let t = build_entanglement_dataset(20, 100, seed);
    assert_eq!(t.n_rows(), 2000);
    assert_eq!(t.names(), ["state", "E", "M_A", "M_B", "C", "absC"]);
    let col = |n: &str| t.column(n).unwrap();
    for id in 0..20 {
        let rows: Vec<usize> = (0..2000).filter(|&r| col("state")[r] == id as f64).collect();
        assert_eq!(rows, (id * 100..id * 100 + 100).collect::<Vec<_>>());
        let mut rng = state_rng(seed, id);
        let rho = random_density_matrix(&mut rng);
        let shots: Vec<(i8, i8)> = rows
            .iter()
            .map(|&r| (col("M_A")[r] as i8, col("M_B")[r] as i8))
            .collect();
        assert_eq!(shots, measure_zz(&rho, 100, &mut rng));
        let c = correlation(&shots);
        for &r in &rows {
            assert_eq!(col("E")[r], log_negativity(&rho));
            assert_eq!(col("C")[r], c);
            assert_eq!(col("absC")[r], c.abs());
        }
    }
    assert_eq!(build_entanglement_dataset(20, 100, seed), t);
}

#[test]
fn forced_bell_state_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let bell = DensityMatrix::bell_phi_plus();
    let shots = measure_zz(&bell, 100, &mut rng);
    let t = entanglement_table(&[(bell, shots)]);
    assert!(t.column("E").unwrap().iter().all(|&e| (e - 1.0).abs() < 1e-12));
    assert!(t.column("C").unwrap().iter().all(|&c| c == 1.0));
}

#[test]
fn tide_loader_joins_converts_and_drops() {
    let es = "doy,d_es_au\n1,0.9833\n2,0.9834\n3,0.9835\n";
    let em = "doy,d_em_km\n1,384400\n2,380000\n3,390000\n";
    let tide = "doy,h_ft\n1,4.0\n1,5.5\n3,6.0\n";
    let d = read_tide_dataset(es.as_bytes(), em.as_bytes(), tide.as_bytes()).unwrap();
    assert_eq!(d.dropped_days, [2]);
    assert_eq!(d.table.n_rows(), 2);
    assert_eq!(d.table.column("h").unwrap(), [5.5, 6.0]);
    assert!((d.table.column("EMd").unwrap()[0] - 384_400.0 / KM_PER_AU).abs() < 1e-15);

    let bad_unit = "doy,d_em_m\n1,384400000\n";
    assert!(matches!(
        read_tide_dataset(es.as_bytes(), bad_unit.as_bytes(), tide.as_bytes()),
        Err(PhenomenaError::UnitMismatch { .. })
    ));
    let malformed = "doy,h_ft\n1,4.0\nx,5\n";
    match read_tide_dataset(es.as_bytes(), em.as_bytes(), malformed.as_bytes()) {
        Err(PhenomenaError::Malformed { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bundled_fixtures_load() {
    let f = fixtures();
    let tides = load_tide_dataset(
        f.join("tides/earth_sun.csv"),
        f.join("tides/earth_moon.csv"),
        f.join("tides/tide.csv"),
    )
    .unwrap();
    assert_eq!(tides.table.n_rows(), 365);
    assert!(tides.dropped_days.is_empty());
    assert!(tides
        .table
        .column("EMd")
        .unwrap()
        .iter()
        .all(|&d| d > 0.002 && d < 0.003));

    let ldr = load_ldr_dataset(f.join("ldr/ldr.csv")).unwrap();
    assert_eq!(ldr.n_rows(), 10);
    let row = |r: usize| ["V", "I", "P", "R"].map(|c| ldr.column(c).unwrap()[r]);
    assert_eq!(row(0), [2.67, 100.3, 5.0, 37.0]);
    assert_eq!(row(9), [8.00, 183.6, 1386.0, 0.413]);
}
