//! Coordinate chart bookkeeping.
//!
//! A chart of complex dimension `n` carries the polynomial variables
//! `z1, zb1, z2, zb2, ..., zn, zbn` and, when it is fibered, the extra
//! pair `w, wb` at the end. One-form generators use a different order:
//! `dz1..dzn, dzb1..dzbn, dw, dwb`. This module converts between the two.

use std::fmt;

/// Shape of a coordinate chart: complex dimension plus an optional fiber
/// coordinate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    pub n: usize,
    pub fiber: bool,
}

/// A named chart variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// `z_i`, zero based.
    Z(usize),
    /// `zb_i`, zero based.
    Zb(usize),
    W,
    Wb,
}

impl Chart {
    pub const fn new(n: usize) -> Self {
        Chart { n, fiber: false }
    }

    pub const fn fibered(n: usize) -> Self {
        Chart { n, fiber: true }
    }

    /// Real dimension of the chart divided by two.
    pub fn complex_dim(&self) -> usize {
        self.n + usize::from(self.fiber)
    }

    /// Number of polynomial variables (and of one-form generators).
    pub fn nvars(&self) -> usize {
        2 * self.complex_dim()
    }

    /// The chart with the fiber pair adjoined.
    pub fn with_fiber(&self) -> Chart {
        Chart { n: self.n, fiber: true }
    }

    pub fn var_index(&self, v: Var) -> usize {
        match v {
            Var::Z(i) => {
                assert!(i < self.n, "z{} outside chart", i + 1);
                2 * i
            }
            Var::Zb(i) => {
                assert!(i < self.n, "zb{} outside chart", i + 1);
                2 * i + 1
            }
            Var::W => {
                assert!(self.fiber, "chart has no fiber variable");
                2 * self.n
            }
            Var::Wb => {
                assert!(self.fiber, "chart has no fiber variable");
                2 * self.n + 1
            }
        }
    }

    pub fn var_at(&self, idx: usize) -> Var {
        let n = self.n;
        if idx < 2 * n {
            if idx.is_multiple_of(2) {
                Var::Z(idx / 2)
            } else {
                Var::Zb(idx / 2)
            }
        } else if idx == 2 * n && self.fiber {
            Var::W
        } else if idx == 2 * n + 1 && self.fiber {
            Var::Wb
        } else {
            panic!("variable index {idx} outside chart {self}")
        }
    }

    /// Index of the variable conjugate to `idx`.
    pub fn conj_var(&self, idx: usize) -> usize {
        idx ^ 1
    }

    /// One-form generator index (bit position) of `d(var)`.
    pub fn gen_of_var(&self, idx: usize) -> usize {
        match self.var_at(idx) {
            Var::Z(i) => i,
            Var::Zb(i) => self.n + i,
            Var::W => 2 * self.n,
            Var::Wb => 2 * self.n + 1,
        }
    }

    /// Variable differentiated by the generator `gen`.
    pub fn var_of_gen(&self, gen: usize) -> usize {
        let n = self.n;
        if gen < n {
            2 * gen
        } else if gen < 2 * n {
            2 * (gen - n) + 1
        } else {
            assert!(self.fiber && gen < 2 * n + 2, "generator {gen} outside chart");
            gen
        }
    }

    /// Generator conjugate to `gen` (`dz_i <-> dzb_i`, `dw <-> dwb`).
    pub fn conj_gen(&self, gen: usize) -> usize {
        let n = self.n;
        if gen < n {
            gen + n
        } else if gen < 2 * n {
            gen - n
        } else if gen == 2 * n {
            2 * n + 1
        } else {
            2 * n
        }
    }

    /// True for holomorphic generators (`dz_i`, `dw`).
    pub fn gen_is_holomorphic(&self, gen: usize) -> bool {
        gen < self.n || gen == 2 * self.n
    }

    pub fn var_name(&self, idx: usize) -> String {
        match self.var_at(idx) {
            Var::Z(i) => format!("z{}", i + 1),
            Var::Zb(i) => format!("zb{}", i + 1),
            Var::W => "wvar".to_string(),
            Var::Wb => "wbvar".to_string(),
        }
    }

    /// Name of the one-form generator, e.g. `dzb2`.
    pub fn gen_name(&self, gen: usize) -> String {
        format!("d{}", self.var_name(self.var_of_gen(gen)).trim_end_matches("var"))
    }

    /// Name of the coordinate vector field dual to `gen`, e.g. `eb1`.
    pub fn vec_name(&self, gen: usize) -> String {
        let n = self.n;
        if gen < n {
            format!("e{}", gen + 1)
        } else if gen < 2 * n {
            format!("eb{}", gen - n + 1)
        } else if gen == 2 * n {
            "ew".to_string()
        } else {
            "ewb".to_string()
        }
    }

    /// Mask with every generator set: the top-degree basis form.
    pub fn top_mask(&self) -> u32 {
        ((1u64 << self.nvars()) - 1) as u32
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fiber {
            write!(f, "C^{}+fiber", self.n)
        } else {
            write!(f, "C^{}", self.n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_and_variable_maps_are_inverse() {
        for chart in [Chart::new(1), Chart::new(2), Chart::fibered(2), Chart::new(3)] {
            for v in 0..chart.nvars() {
                assert_eq!(chart.var_of_gen(chart.gen_of_var(v)), v);
                let g = chart.gen_of_var(v);
                assert_eq!(chart.gen_of_var(chart.conj_var(v)), chart.conj_gen(g));
            }
        }
    }

    #[test]
    fn names() {
        let c = Chart::fibered(2);
        assert_eq!(c.gen_name(0), "dz1");
        assert_eq!(c.gen_name(3), "dzb2");
        assert_eq!(c.gen_name(4), "dw");
        assert_eq!(c.gen_name(5), "dwb");
        assert_eq!(c.var_name(5), "wbvar");
        assert_eq!(c.vec_name(5), "ewb");
    }
}
