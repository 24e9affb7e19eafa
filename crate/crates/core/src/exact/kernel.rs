//! The five-state hyperedge kernel and the fan-gadget closed forms.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, in_unit_interval, int, Rational};

/// Partition of the terminals `{a, b, c}`; `a` is the apex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TerminalPartition {
    Abc,
    AbC,
    AcB,
    ABc,
    ABC,
}

impl TerminalPartition {
    pub const ALL: [TerminalPartition; 5] = [
        TerminalPartition::Abc,
        TerminalPartition::AbC,
        TerminalPartition::AcB,
        TerminalPartition::ABc,
        TerminalPartition::ABC,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> TerminalPartition {
        Self::ALL[i]
    }

    /// Partition induced by the three pairwise connectivity flags.
    #[inline]
    pub fn classify(ab: bool, ac: bool, bc: bool) -> TerminalPartition {
        match (ab, ac, bc) {
            (true, true, _) | (true, _, true) | (_, true, true) => TerminalPartition::Abc,
            (true, false, false) => TerminalPartition::AbC,
            (false, true, false) => TerminalPartition::AcB,
            (false, false, true) => TerminalPartition::ABc,
            (false, false, false) => TerminalPartition::ABC,
        }
    }

    /// Pairs of terminals (0 = a, 1 = b, 2 = c) merged by this state.
    pub fn merges(self) -> &'static [(usize, usize)] {
        match self {
            TerminalPartition::Abc => &[(0, 1), (0, 2)],
            TerminalPartition::AbC => &[(0, 1)],
            TerminalPartition::AcB => &[(0, 2)],
            TerminalPartition::ABc => &[(1, 2)],
            TerminalPartition::ABC => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TerminalPartition::Abc => "abc",
            TerminalPartition::AbC => "ab|c",
            TerminalPartition::AcB => "ac|b",
            TerminalPartition::ABc => "a|bc",
            TerminalPartition::ABC => "a|b|c",
        }
    }
}

/// Probabilities of the five partitions of `{a, b, c}`; they sum to one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperedgeKernel {
    pub p_abc: Rational,
    pub p_ab_c: Rational,
    pub p_ac_b: Rational,
    pub p_a_bc: Rational,
    pub p_a_b_c: Rational,
}

impl HyperedgeKernel {
    pub fn new(
        p_abc: Rational,
        p_ab_c: Rational,
        p_ac_b: Rational,
        p_a_bc: Rational,
        p_a_b_c: Rational,
    ) -> Result<Self> {
        HyperedgeKernel::from_array([p_abc, p_ab_c, p_ac_b, p_a_bc, p_a_b_c])
    }

    /// Fields in [`TerminalPartition::ALL`] order.
    pub fn from_array(values: [Rational; 5]) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !in_unit_interval(v)) {
            return Err(Error::invalid(format!("kernel entry {} outside [0, 1]", fmt_rational(bad))));
        }
        let total: Rational = values.iter().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("kernel sums to {}, not 1", fmt_rational(&total))));
        }
        let [p_abc, p_ab_c, p_ac_b, p_a_bc, p_a_b_c] = values;
        Ok(HyperedgeKernel { p_abc, p_ab_c, p_ac_b, p_a_bc, p_a_b_c })
    }

    pub fn get(&self, part: TerminalPartition) -> &Rational {
        match part {
            TerminalPartition::Abc => &self.p_abc,
            TerminalPartition::AbC => &self.p_ab_c,
            TerminalPartition::AcB => &self.p_ac_b,
            TerminalPartition::ABc => &self.p_a_bc,
            TerminalPartition::ABC => &self.p_a_b_c,
        }
    }

    pub fn to_array(&self) -> [Rational; 5] {
        TerminalPartition::ALL.map(|s| self.get(s).clone())
    }

    /// Deterministic kernel connecting everything.
    pub fn all_connected() -> Self {
        HyperedgeKernel::from_array([int(1), int(0), int(0), int(0), int(0)]).expect("valid")
    }

    /// Deterministic kernel connecting nothing.
    pub fn none_connected() -> Self {
        HyperedgeKernel::from_array([int(0), int(0), int(0), int(0), int(1)]).expect("valid")
    }

    /// `p_abc * p_a|b|c - p_ab|c * p_ac|b`.
    pub fn hk_margin(&self) -> Rational {
        &self.p_abc * &self.p_a_b_c - &self.p_ab_c * &self.p_ac_b
    }
}

impl serde::Serialize for HyperedgeKernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(5))?;
        for part in TerminalPartition::ALL {
            map.serialize_entry(part.name(), &fmt_rational(self.get(part)))?;
        }
        map.end()
    }
}

/// `400 p_a|bc <= p_abc p_a|b|c - p_ab|c^2`.
pub fn check_eq390(k: &HyperedgeKernel) -> bool {
    int(400) * &k.p_a_bc <= &k.p_abc * &k.p_a_b_c - &k.p_ab_c * &k.p_ab_c
}

/// Harris-Kleitman consequence `p_ab|c p_ac|b <= p_abc p_a|b|c`.
pub fn check_hk(k: &HyperedgeKernel) -> bool {
    &k.p_ab_c * &k.p_ac_b <= &k.p_abc * &k.p_a_b_c
}

fn pow(p: &Rational, e: usize) -> Rational {
    p.pow(e as i32)
}

fn check_open_unit(p: &Rational) -> Result<()> {
    if !p.is_positive() || *p >= Rational::one() {
        return Err(Error::invalid(format!("p = {} must lie in (0, 1)", fmt_rational(p))));
    }
    Ok(())
}

/// `P(a <-> v_n) = (1 - p^{2n}) / (1 + p)`; by the reflection symmetry of
/// the fan this is also `P(a <-> v_1)`.
pub fn gadget_marginal_closed(n: usize, p: &Rational) -> Rational {
    (Rational::one() - pow(p, 2 * n)) / (Rational::one() + p)
}

/// `P(a <-> v_1 <-> v_n) = (1 - p^{2n}) / (1 + p)^2 + n (1 - p) p^{2n-1} / (1 + p)`.
pub fn gadget_three_closed(n: usize, p: &Rational) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    let one = Rational::one();
    let q = &one + p;
    (&one - pow(p, 2 * n)) / (&q * &q) + int(n as i64) * (&one - p) * pow(p, 2 * n - 1) / q
}

/// `P(a !<-> v_1 <-> v_n) = p^{2n-1}`, for `n >= 1`.
pub fn gadget_bc_only_closed(n: usize, p: &Rational) -> Result<Rational> {
    if n == 0 {
        return Err(Error::invalid("gadget_bc_only_closed needs n >= 1"));
    }
    Ok(pow(p, 2 * n - 1))
}

/// Terminal kernel of the `n`-fan with `b = v_1`, `c = v_n`, assembled
/// from the three closed forms.
pub fn gadget_kernel_closed(n: usize, p: &Rational) -> Result<HyperedgeKernel> {
    if n < 2 {
        return Err(Error::invalid("gadget kernel needs n >= 2"));
    }
    check_open_unit(p)?;
    let three = gadget_three_closed(n, p);
    let pair = gadget_marginal_closed(n, p) - &three;
    let bc = gadget_bc_only_closed(n, p)?;
    let rest = Rational::one() - &three - &pair - &pair - &bc;
    HyperedgeKernel::from_array([three, pair.clone(), pair, bc, rest])
}

/// `(n (1 - p) / (1 + p) - 1) p^{2n-1}`, after confirming that the closed
/// form kernel's `p_abc p_a|b|c - p_ac|b p_ab|c` is at least this large.
pub fn kernel_gap_lower_bound(n: usize, p: &Rational) -> Result<Rational> {
    let kernel = gadget_kernel_closed(n, p)?;
    let one = Rational::one();
    let bound = (int(n as i64) * (&one - p) / (&one + p) - &one) * pow(p, 2 * n - 1);
    let actual = kernel.hk_margin();
    if actual < bound {
        return Err(Error::Verification(format!(
            "kernel margin {} below lower bound {} at n = {n}",
            fmt_rational(&actual),
            fmt_rational(&bound)
        )));
    }
    Ok(bound)
}
