//! Inputs shared by the benchmarks.

use igusa::{parse_vars, Fan, Mapping, NewtonPolyhedron};

pub struct Case {
    pub name: &'static str,
    pub mapping: &'static str,
    pub vars: &'static str,
}

pub const CASES: &[Case] = &[
    Case { name: "plane", mapping: "x^3 - x*y; y", vars: "x,y" },
    Case { name: "space-curve", mapping: "y^2 - x^3; y^2 - z^2", vars: "x,y,z" },
    Case { name: "quadrics", mapping: "x^2; y^2; z^2; x*y; x*z; y*z", vars: "x,y,z" },
];

pub struct Prepared {
    pub mapping: Mapping,
    pub poly: NewtonPolyhedron,
    pub fan: Fan,
}

impl Case {
    pub fn parse(&self) -> Mapping {
        Mapping::parse(self.mapping, &parse_vars(self.vars).unwrap()).unwrap()
    }

    pub fn prepare(&self) -> Prepared {
        let mapping = self.parse();
        let poly = NewtonPolyhedron::of_mapping(&mapping).unwrap();
        let fan = Fan::normal(&poly).simplicial_subdivision().unwrap();
        Prepared { mapping, poly, fan }
    }
}
