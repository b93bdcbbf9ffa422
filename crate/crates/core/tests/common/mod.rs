#![allow(dead_code)]

use igusa::{parse_vars, Fan, Mapping, NewtonPolyhedron, Q};

#[derive(Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
    pub vars: &'static str,
}

pub const PLANE: Fixture = Fixture { name: "x^3-xy,y", text: "x^3 - x*y; y", vars: "x,y" };
pub const SPACE_CURVE: Fixture = Fixture { name: "y^2-x^3,y^2-z^2", text: "y^2 - x^3; y^2 - z^2", vars: "x,y,z" };
pub const CUSPS: Fixture = Fixture { name: "y^2-x^3,x^2-y^3", text: "y^2 - x^3; x^2 - y^3", vars: "x,y" };
pub const LINEAR: Fixture = Fixture { name: "x,x+2y", text: "x; x + 2*y", vars: "x,y" };
pub const DEGENERATE: Fixture = Fixture { name: "x^2-y^2,x^3,y^3", text: "x^2 - y^2; x^3; y^3", vars: "x,y" };
pub const QUADRICS: Fixture = Fixture { name: "x^2,y^2,z^2,xy,xz,yz", text: "x^2; y^2; z^2; x*y; x*z; y*z", vars: "x,y,z" };

/// The four closed-form fixtures, in order.
pub const CLOSED_FORM: [Fixture; 4] = [PLANE, SPACE_CURVE, CUSPS, LINEAR];

pub const ALL: [Fixture; 6] = [PLANE, SPACE_CURVE, CUSPS, LINEAR, DEGENERATE, QUADRICS];

pub struct Built {
    pub mapping: Mapping,
    pub poly: NewtonPolyhedron,
    pub normal: Fan,
    pub simplicial: Fan,
}

impl Fixture {
    pub fn mapping(&self) -> Mapping {
        Mapping::parse(self.text, &parse_vars(self.vars).unwrap()).unwrap()
    }

    pub fn build(&self) -> Built {
        let mapping = self.mapping();
        let poly = NewtonPolyhedron::of_mapping(&mapping).unwrap();
        let normal = Fan::normal(&poly);
        let simplicial = normal.simplicial_subdivision().unwrap();
        Built { mapping, poly, normal, simplicial }
    }
}

pub fn r(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// `q^e` as an exact rational.
pub fn qp(q: u64, e: i64) -> Q {
    igusa::arith::q_pow(q, e)
}
