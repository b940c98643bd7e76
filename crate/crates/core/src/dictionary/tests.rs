use proptest::prelude::*;

use super::*;
use crate::linalg::{dot, norm_inf};

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn gen(c: Construction) -> (Dictionary<f64>, Metadata) {
    generate(&c).unwrap()
}

fn lcg(rows: usize, cols: usize, mut seed: u64) -> Matrix<f64> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        data.push(((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0);
    }
    Matrix::from_row_major(rows, cols, data).unwrap()
}

/// Explicit inverse of a small SPD matrix via Cholesky, for oracles.
fn spd_inverse(a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            l[(i, j)] = if i == j { (a[(i, i)] - s).sqrt() } else { (a[(i, j)] - s) / l[(j, j)] };
        }
    }
    let mut inv = Matrix::zeros(n, n);
    for c in 0..n {
        let mut z = vec![0.0; n];
        for i in 0..n {
            let rhs = if i == c { 1.0 } else { 0.0 };
            z[i] = (rhs - (0..i).map(|k| l[(i, k)] * z[k]).sum::<f64>()) / l[(i, i)];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = (z[i] - ((i + 1)..n).map(|k| l[(k, i)] * x[k]).sum::<f64>()) / l[(i, i)];
        }
        inv.set_column(c, &x);
    }
    inv
}

#[test]
fn support_set_algebra() {
    let a: SupportSet = "3, 1,5".parse().unwrap();
    assert_eq!(a.indices(), &[1, 3, 5]);
    let b = SupportSet::new([5, 0]).unwrap();
    assert_eq!(a.union(&b).indices(), &[0, 1, 3, 5]);
    assert_eq!(a.intersection(&b).indices(), &[5]);
    assert_eq!(a.difference(&b).indices(), &[1, 3]);
    assert_eq!(a.complement(6).indices(), &[0, 2, 4]);
    assert!(matches!(SupportSet::new([1, 1]), Err(Error::DuplicateIndex(1))));
    assert!(matches!(a.check(5), Err(Error::IndexOutOfRange { index: 5, n: 5 })));
    assert_eq!("".parse::<SupportSet>().unwrap(), SupportSet::empty());
    assert_eq!(a.to_string(), "1,3,5");
    assert_eq!(serde_json::to_string(&a).unwrap(), "[1,3,5]");
}

#[test]
fn build_checks_columns() {
    let d = Dictionary::build(Matrix::<f64>::identity(3), false).unwrap();
    assert_eq!(d.atoms(), &Matrix::identity(3));
    let d = Dictionary::build(Matrix::diagonal(&[2.0, 3.0]), true).unwrap();
    assert_eq!(d.atoms(), &Matrix::identity(2));
    assert!(matches!(
        Dictionary::build(Matrix::diagonal(&[2.0, 0.0]), true),
        Err(Error::ZeroColumn(1))
    ));
    assert!(matches!(
        Dictionary::build(Matrix::diagonal(&[1.0, 1.0 + 1e-6]), false),
        Err(Error::NotNormalized { index: 1, .. })
    ));
}

#[test]
fn coherence_cases() {
    let d = Dictionary::build(Matrix::<f64>::identity(4), false).unwrap();
    assert_eq!(mutual_coherence(&d), 0.0);
    let (d, _) = gen(Construction::Equiangular { k: 2, g: 0, b: 0 });
    assert!((mutual_coherence(&d) - 1.0 / 3.0).abs() < 1e-12);

    let d = Dictionary::build(lcg(5, 8, 41), true).unwrap();
    let mut oracle: f64 = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            if i != j {
                oracle = oracle.max(dot(&d.atom(i), &d.atom(j)).abs());
            }
        }
    }
    assert!((mutual_coherence(&d) - oracle).abs() < 1e-15);
}

#[test]
fn equiangular_shape_and_spark() {
    let (d, meta) = gen(Construction::Equiangular { k: 3, g: 1, b: 1 });
    assert_eq!((d.rows(), d.n()), (5, 6));
    assert!((mutual_coherence(&d) - 0.2).abs() < 1e-12);
    assert_eq!(d.spark(&tol()), Spark::Finite(6));
    assert_eq!(meta.canonical_q.unwrap().indices(), &[0, 1]);
    assert_eq!(meta.canonical_qstar.unwrap().indices(), &[0, 2, 3]);
    let k = d.kernel_basis(&tol());
    assert_eq!(k.cols(), 1);
    let v = k.column(0);
    assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-10));
}

#[test]
fn equiangular_f32() {
    let (d, _) = generate::<f32>(&Construction::Equiangular { k: 2, g: 1, b: 0 }).unwrap();
    assert!((d.mutual_coherence() - 0.5).abs() < 1e-5);
}

#[test]
fn lemma1_spectrum() {
    let (d, meta) = gen(Construction::Lemma1 { k: 4, g: 1, b: 1 });
    assert_eq!((d.rows(), d.n()), (6, 6));
    let ev = gram_submatrix_eigen(&d, &SupportSet::range(0..6));
    let r = 1.0 / 3f64.sqrt();
    assert!((ev[0] - (1.0 + r)).abs() < 1e-12);
    assert!((ev[5] - (1.0 - r)).abs() < 1e-12);
    for e in &ev[1..5] {
        assert!((e - 1.0).abs() < 1e-12);
    }
    assert_eq!(meta.canonical_q.unwrap().indices(), &[0, 1]);
    assert_eq!(meta.canonical_qstar.unwrap().indices(), &[1, 2, 3, 4]);

    let (d, _) = gen(Construction::Lemma1 { k: 4, g: 3, b: 1 });
    assert_eq!(d.spark(&tol()), Spark::Finite(2));
}

#[test]
fn example1_kernel() {
    let (d, meta) = gen(Construction::Example1 { n: 6, gamma: 0.2 });
    assert_eq!((d.rows(), d.n()), (5, 6));
    let k = d.kernel_basis(&tol());
    assert_eq!(k.cols(), 1);
    let v = k.column(0);
    let scale = v[5];
    let want = [0.2, 0.2, 0.2, 0.2, 1.0, 1.0];
    for (x, w) in v.iter().zip(want) {
        assert!((x / scale - w).abs() < 1e-10);
    }
    assert_eq!(d.spark(&tol()), Spark::Finite(6));
    assert_eq!(meta.canonical_qstar.unwrap().indices(), &[4, 5]);
    assert!(generate::<f64>(&Construction::Example1 { n: 6, gamma: 0.25 }).is_err());
}

#[test]
fn example2_and_example3_grams() {
    let (d, meta) = gen(Construction::Example2 { k: 4, g: 1, alpha: 0.5 });
    let mu = 0.5 / 6.0;
    assert!((meta.mu - mu).abs() < 1e-15);
    for i in 0..5 {
        for j in 0..5 {
            let want = if i == j { 1.0 } else { -mu };
            assert!((d.gram()[(i, j)] - want).abs() < 1e-12);
        }
    }
    let (d, _) = gen(Construction::Example3 { k: 4, mu: 0.3 });
    let ev = gram_submatrix_eigen(&d, &SupportSet::range(0..5));
    assert!((ev[0] - 1.3).abs() < 1e-12 && (ev[4] - 0.7).abs() < 1e-12);
}

#[test]
fn invalid_params_are_named() {
    let bad = [
        Construction::Equiangular { k: 2, g: 2, b: 0 },
        Construction::Lemma1 { k: 1, g: 1, b: 0 },
        Construction::Example2 { k: 3, g: 0, alpha: 1.0 },
        Construction::Example3 { k: 3, mu: 1.0 },
        Construction::Example1 { n: 2, gamma: 0.0 },
    ];
    for c in bad {
        assert!(matches!(generate::<f64>(&c), Err(Error::InvalidParams(_))), "{c:?}");
    }
}

#[test]
fn projection_empty_support_is_identity() {
    let d = Dictionary::build(lcg(4, 6, 3), true).unwrap();
    let p = ProjectedDictionary::new(&d, &SupportSet::empty(), &tol()).unwrap();
    assert!(p.a_tilde().max_abs_diff(d.atoms()) < 1e-15);
    assert!(p.b_tilde().max_abs_diff(d.atoms()) < 1e-12);
}

#[test]
fn equiangular_projected_norms_equal() {
    let (d, _) = gen(Construction::Equiangular { k: 3, g: 1, b: 1 });
    let q = SupportSet::new([1, 4]).unwrap();
    let p = ProjectedDictionary::new(&d, &q, &tol()).unwrap();
    let outside: Vec<f64> = q.complement(6).iter().map(|i| p.norms()[i]).collect();
    assert!(outside.iter().all(|x| (x - outside[0]).abs() < 1e-12 && *x > 0.1));
    let beta = 1.0 / outside[0];
    for i in q.complement(6).iter() {
        for r in 0..d.rows() {
            assert!((p.b_tilde()[(r, i)] - beta * p.a_tilde()[(r, i)]).abs() < 1e-12);
        }
    }
    for i in q.iter() {
        assert_eq!(norm_inf(&p.a_tilde().column(i)), 0.0);
    }
}

#[test]
fn lemma1_projection_block() {
    let (d, meta) = gen(Construction::Lemma1 { k: 3, g: 1, b: 0 });
    let q = meta.canonical_q.unwrap();
    let p = ProjectedDictionary::new(&d, &q, &tol()).unwrap();
    for i in q.complement(d.n()).iter() {
        let diff = norm_inf(&sub_vec(&p.a_tilde().column(i), &d.atom(i)));
        assert!(diff < 1e-15);
    }
}

fn sub_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[test]
fn lemma12_closed_forms() {
    for (k, g, b) in [(3, 1, 1), (4, 0, 1), (2, 1, 0)] {
        let (d, meta) = gen(Construction::Equiangular { k, g, b });
        let n = d.n();
        let mu = meta.mu;
        for size in 0..n {
            let r = SupportSet::range(0..size);
            let p = ProjectedDictionary::new(&d, &r, &tol()).unwrap();
            let quad = if size == 0 {
                0.0
            } else {
                let inv = spd_inverse(&d.gram().principal(r.indices()));
                inv.as_slice().iter().sum::<f64>()
            };
            for i in size..n {
                let ai = p.a_tilde().column(i);
                assert!((dot(&ai, &ai) - (1.0 - mu * mu * quad)).abs() < 1e-9);
                for j in (i + 1)..n {
                    let aj = p.a_tilde().column(j);
                    assert!((dot(&ai, &aj) - (-mu - mu * mu * quad)).abs() < 1e-9);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn projected_inner_products_match_gram_formula(seed in 0u64..10_000, qsize in 0usize..3) {
        let d = Dictionary::build(lcg(6, 8, seed), true).unwrap();
        let q = SupportSet::range(0..qsize);
        prop_assume!(crate::linalg::check_full_column_rank(&d.select(&q), &tol()).is_ok());
        let p = ProjectedDictionary::new(&d, &q, &tol()).unwrap();
        let g = d.gram();
        let inv = if qsize > 0 { Some(spd_inverse(&g.principal(q.indices()))) } else { None };
        for i in qsize..8 {
            for j in qsize..8 {
                let mut want = g[(i, j)];
                if let Some(inv) = &inv {
                    let gi: Vec<f64> = q.iter().map(|r| g[(r, i)]).collect();
                    let gj: Vec<f64> = q.iter().map(|r| g[(r, j)]).collect();
                    want -= dot(&gi, &inv.mul_vec(&gj));
                }
                let got = dot(&p.a_tilde().column(i), &p.a_tilde().column(j));
                prop_assert!((got - want).abs() < 1e-9);
            }
        }
        for i in qsize..8 {
            let nb = norm(&p.b_tilde().column(i));
            prop_assert!((nb - 1.0).abs() < 1e-10);
        }
    }
}
