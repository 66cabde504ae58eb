//! Algebras shipped with the crate.

use crate::algebra::FiniteAlgebra;

macro_rules! fixture {
    ($name:ident, $file:literal) => {
        pub fn $name() -> FiniteAlgebra {
            FiniteAlgebra::from_json(include_str!(concat!("../fixtures/", $file))).expect("valid fixture")
        }
    };
}

fixture!(z4, "z4.json");
fixture!(z8, "z8.json");
fixture!(z2xz2, "z2xz2.json");
fixture!(d4, "d4.json");
fixture!(q8, "q8.json");
fixture!(m_ring, "m_ring.json");
fixture!(semilattice2, "semilattice2.json");
fixture!(lattice2, "lattice2.json");
fixture!(chain3, "chain3.json");
fixture!(trivial, "trivial.json");

/// Every shipped fixture, by file stem.
pub fn all() -> Vec<(&'static str, FiniteAlgebra)> {
    vec![
        ("z4", z4()),
        ("z8", z8()),
        ("z2xz2", z2xz2()),
        ("d4", d4()),
        ("q8", q8()),
        ("m_ring", m_ring()),
        ("semilattice2", semilattice2()),
        ("lattice2", lattice2()),
        ("chain3", chain3()),
        ("trivial", trivial()),
    ]
}
