use num_bigint::BigInt;
use proptest::prelude::*;

use lefschetz_core::extension::{symplectic_extension, Constraint};
use lefschetz_core::ledger::{slope_report, LedgerFlags};
use lefschetz_core::snf::smith_normal_form;
use lefschetz_core::word::Direction;
use lefschetz_core::{
    BigClass, BigLedger, Class, CurveExpr, CurveName, Factorization, IntMatrix, Ledger, MapExpr, Surface,
    SymplecticLattice,
};

fn class(genus: usize) -> impl Strategy<Value = Class> {
    prop::collection::vec(-6i64..=6, 2 * genus).prop_map(|v| Class::new(v).unwrap())
}

fn chain_names(g: usize) -> Vec<CurveName> {
    let mut out: Vec<CurveName> = (1..=2 * g + 1).map(CurveName::C).collect();
    out.push(CurveName::U);
    out.extend((1..=g).map(CurveName::D));
    out
}

fn word(g: usize, max: usize) -> impl Strategy<Value = Vec<CurveExpr>> {
    let names = chain_names(g);
    prop::collection::vec(0..names.len(), 1..=max)
        .prop_map(move |ix| ix.into_iter().map(|i| CurveExpr::Named(names[i])).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairing_is_alternating((u, v) in (1usize..=4).prop_flat_map(|g| (class(g), class(g)))) {
        prop_assert_eq!(u.pairing(&v).unwrap(), -v.pairing(&u).unwrap());
        prop_assert_eq!(u.pairing(&u).unwrap(), 0);
    }

    #[test]
    fn transvections_preserve_the_form(u in class(3), v in class(3), c in class(3), k in -3i64..=3) {
        let lattice = SymplecticLattice::<i64>::new(3);
        let t = lattice.transvection_power(&c, &k).unwrap();
        prop_assert!(lattice.is_symplectic(&t));
        let (tu, tv) = (t.apply(&u).unwrap(), t.apply(&v).unwrap());
        prop_assert_eq!(tu.pairing(&tv).unwrap(), u.pairing(&v).unwrap());
        // T_c(v) = v + <v, c> c
        let mut manual = v.clone();
        manual.twist_by(&c, &1);
        prop_assert_eq!(lattice.transvection(&c).unwrap().apply(&v).unwrap(), manual);
        let inv = lattice.symplectic_inverse(&t);
        prop_assert!(t.try_mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn scalars_agree(v in prop::collection::vec(-1000i64..=1000, 6), w in prop::collection::vec(-1000i64..=1000, 6)) {
        let (a, b) = (Class::new(v.clone()).unwrap(), Class::new(w.clone()).unwrap());
        let big = |x: &[i64]| BigClass::new(x.iter().map(|&y| BigInt::from(y)).collect()).unwrap();
        prop_assert_eq!(BigInt::from(a.pairing(&b).unwrap()), big(&v).pairing(&big(&w)).unwrap());
        let wide = |x: &[i64]| lefschetz_core::HomologyClass::<i128>::new(x.iter().map(|&y| y as i128).collect()).unwrap();
        prop_assert_eq!(a.pairing(&b).unwrap() as i128, wide(&v).pairing(&wide(&w)).unwrap());
    }

    #[test]
    fn smith_form_divisibility(rows in prop::collection::vec(prop::collection::vec(-9i64..=9, 4), 1..=5)) {
        let m = IntMatrix::from_rows(rows).unwrap();
        let s = smith_normal_form(&m);
        prop_assert_eq!(&s.left.try_mul(&m).unwrap().try_mul(&s.right).unwrap(), &s.diag);
        let d = s.divisors();
        for pair in d.windows(2) {
            if pair[0] == 0 {
                prop_assert_eq!(pair[1], 0);
            } else {
                prop_assert_eq!(pair[1] % pair[0], 0);
            }
        }
        prop_assert!(d.iter().all(|x| *x >= 0));
    }

    #[test]
    fn normalize_is_idempotent(w in word(3, 6), k in -2i64..=2, e in 0usize..6) {
        let s = Surface::standard(3).unwrap();
        let map = MapExpr::power(MapExpr::Compose(w.iter().cloned().map(MapExpr::twist).collect()), k);
        let target = w[e % w.len()].clone();
        let curve = CurveExpr::image(map.clone(), target);
        let once = s.normalize_curve(&curve);
        prop_assert_eq!(&s.normalize_curve(&once), &once);
        prop_assert_eq!(s.homology_of_curve(&once).unwrap().up_to_sign(), s.homology_of_curve(&curve).unwrap().up_to_sign());
        let nm = s.normalize_map(&map);
        prop_assert_eq!(&s.normalize_map(&nm), &nm);
        prop_assert_eq!(s.matrix_of_map(&nm).unwrap(), s.matrix_of_map(&map).unwrap());
    }

    #[test]
    fn ledger_identities(g in 2usize..=12, n in 0i64..=10_000, chi_h in 0i64..=2000) {
        let e = 4 - 4 * g as i64 + n;
        let sigma = 4 * chi_h - e;
        let l = Ledger::new(g, n, sigma, LedgerFlags::default());
        let Ok(r) = slope_report(&l) else { return Ok(()); };
        // Noether: c1² + e = 12 χ_h
        prop_assert_eq!(r.c1_sq + r.e, 12 * r.chi_h);
        prop_assert_eq!(r.k_sq, r.c1_sq + 8 * (g as i64 - 1));
        prop_assert_eq!(r.chi_f, r.chi_h + g as i64 - 1);
        let big: BigLedger = l.cast().unwrap();
        let rb = slope_report(&big).unwrap();
        prop_assert_eq!(rb.k_sq, BigInt::from(r.k_sq));
        prop_assert_eq!(rb.lambda.numer().clone(), BigInt::from(*r.lambda.numer()));
        // fiber sums add (n, σ), so e(X₁#X₂) = e₁ + e₂ + 4g − 4
        let sum = l.fiber_sum(&l).unwrap();
        prop_assert_eq!(sum.euler(), 2 * l.euler() + 4 * g as i64 - 4);
    }

    #[test]
    fn hurwitz_moves_undo(w in word(3, 30), at in any::<prop::sample::Index>()) {
        let s = Surface::standard(3).unwrap();
        let n = w.len() as i64;
        prop_assume!(n >= 2);
        let f = Factorization::new(3, w, Ledger::new(3, n, 0, LedgerFlags::default()), vec![]).unwrap();
        let i = at.index(f.len() - 1);
        let back = f.hurwitz_move(&s, i, Direction::Right).unwrap().hurwitz_move(&s, i, Direction::Left).unwrap();
        let norm = |x: &Factorization| x.letters().iter().map(|e| s.normalize_curve(e)).collect::<Vec<_>>();
        prop_assert_eq!(back.homology_classes(&s).unwrap(), f.homology_classes(&s).unwrap());
        prop_assert_eq!(norm(&back), norm(&f));
    }

    #[test]
    fn extension_hits_its_target(a in 1usize..=7, b in 1usize..=7) {
        let s = Surface::standard(3).unwrap();
        let (ca, cb) = (CurveName::C(a), CurveName::C(b));
        let src = s.table().class(ca).unwrap().clone();
        let dst = s.table().class(cb).unwrap().clone();
        let m = symplectic_extension(s.lattice(), &[Constraint::exact(src.clone(), dst.clone())]).unwrap();
        prop_assert!(s.lattice().is_symplectic(&m));
        prop_assert_eq!(m.apply(&src).unwrap(), dst);
    }
}

#[test]
fn flags_survive_casts() {
    let l = Ledger::relator(3, 28, -16, "hyperelliptic");
    let big: BigLedger = l.cast().unwrap();
    assert_eq!(big.flags, l.flags);
    assert_eq!(big.cast::<i64>().unwrap(), l);
}
