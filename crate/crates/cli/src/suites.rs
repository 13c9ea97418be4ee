//! Built-in verification suites aggregated by `verify-all`.

use mukai_lab::fm::{fm_components_explicit, induced_h2_isometry, standard_fm_isometry, verify_fm_axioms};
use mukai_lab::lattice::{
    euler_characteristic_and_dimension, k3_lattice, orthogonal_complement_quotient, MukaiLattice, MukaiVector,
};
use mukai_lab::report::{Check, CheckList};
use mukai_lab::spin4::verify_spin_identities;
use mukai_lab::{BigInt, ExactSpinModule, Result, SpinModule};

pub fn prefixed(prefix: &str, list: CheckList) -> CheckList {
    CheckList {
        checks: list
            .checks
            .into_iter()
            .map(|mut c| {
                c.name = format!("{prefix}.{}", c.name);
                c
            })
            .collect(),
    }
}

fn unit(i: usize) -> Vec<i64> {
    let mut e = vec![0; 22];
    e[i] = 1;
    e
}

/// Isotropic primitive vectors exercised by the lattice and FM suites.
pub fn builtin_vectors() -> Vec<(&'static str, MukaiVector)> {
    let mut c = vec![0; 22];
    c[0] = 1;
    c[1] = 2;
    vec![
        ("point", MukaiVector::from_i64(0, &[0; 22], 1)),
        ("structure_sheaf_dual", MukaiVector::from_i64(1, &[0; 22], 0)),
        ("rank_one_isotropic_c1", MukaiVector::from_i64(1, &unit(0), 0)),
        ("rank_two", MukaiVector::from_i64(2, &c, 1)),
    ]
}

pub fn lattice_suite() -> Result<CheckList> {
    let mukai = MukaiLattice::k3();
    let h2 = k3_lattice();
    let mut out = CheckList::new();
    let inv = h2.invariants();
    out.push(
        Check::exact(
            "k3_lattice_invariants",
            inv.rank == 22 && inv.is_even && inv.is_unimodular && inv.signature == (3, 19),
        )
        .with_detail(format!("rank {}, det {}, signature {:?}", inv.rank, inv.determinant, inv.signature)),
    );
    let v = MukaiVector::from_i64(1, &[0; 22], 1);
    let (chi, dim) = euler_characteristic_and_dimension(&v, &v, &h2)?;
    let pairing = mukai.pair(&v, &v)?;
    out.push(
        Check::exact("pairing_and_chi", pairing == BigInt::from(-2) && chi == BigInt::from(2))
            .with_detail(format!("(v,v) = {pairing}, χ = {chi}, dim = {dim:?}")),
    );
    let e = MukaiVector::from_i64(1, &unit(0), 0);
    let (_, dim) = euler_characteristic_and_dimension(&e, &e, &h2)?;
    out.push(Check::exact("moduli_dimension", dim == Some(BigInt::from(2))).with_detail(format!("dim = {dim:?}")));
    for (name, v) in builtin_vectors() {
        let q = orthogonal_complement_quotient(&v, &mukai)?;
        let inv = q.quotient.invariants();
        out.push(
            Check::exact(
                format!("quotient_invariants.{name}"),
                inv.rank == 22
                    && inv.determinant == BigInt::from(-1)
                    && inv.signature == (3, 19)
                    && inv.is_even,
            )
            .with_detail(format!("rank {}, det {}, signature {:?}", inv.rank, inv.determinant, inv.signature)),
        );
    }
    Ok(out)
}

pub fn fm_suite() -> Result<CheckList> {
    let mukai = MukaiLattice::k3();
    let mut out = CheckList::new();
    for (name, v) in builtin_vectors() {
        let fm = standard_fm_isometry(&v, &mukai)?;
        out.extend(prefixed(&format!("fm.{name}"), verify_fm_axioms(&fm)));
        if v.r != BigInt::from(0) {
            let mut all = true;
            for i in 0..22 {
                let alpha: Vec<BigInt> = unit(i).into_iter().map(BigInt::from).collect();
                all &= fm_components_explicit(&fm, &alpha)?.checks.all_passed();
            }
            out.push(Check::exact(format!("fm.{name}.components_on_basis"), all));
        }
        out.extend(prefixed(&format!("fm.{name}.induced"), induced_h2_isometry(&fm)?.checks));
    }
    Ok(out)
}

pub fn spin_suite(samples: usize, exact_samples: usize, tol: f64, seed: u64) -> Result<CheckList> {
    let mut out = prefixed("float", verify_spin_identities(&SpinModule::new(), samples, tol, seed)?);
    out.extend(prefixed("exact", verify_spin_identities(&ExactSpinModule::new(), exact_samples, 0.0, seed)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_vectors_are_isotropic_and_primitive() {
        let m = MukaiLattice::k3();
        for (name, v) in builtin_vectors() {
            assert_eq!(m.pair(&v, &v).unwrap(), BigInt::from(0), "{name}");
            assert!(v.is_primitive(), "{name}");
        }
    }

    #[test]
    fn lattice_suite_passes() {
        let s = lattice_suite().unwrap();
        assert!(s.all_passed(), "{:?}", s.first_failure());
    }
}
