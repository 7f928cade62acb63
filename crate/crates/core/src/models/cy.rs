use std::fmt;

/// Weight data of a projective superspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyWeights {
    /// `P^{n|N}`.
    Projective { n: u32, n_odd: u32 },
    /// `WP^{n|N}[k_1..k_{n+1} | l_1..l_N]`.
    Weighted { even: Vec<i64>, odd: Vec<i64> },
    /// `L^{5|2N}`.
    Ambitwistor { n_odd: u32 },
}

/// Coefficients of the first Chern class in the hyperplane classes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CyIndex {
    Single(i64),
    Pair(i64, i64),
}

impl CyIndex {
    pub fn is_calabi_yau(self) -> bool {
        match self {
            CyIndex::Single(a) => a == 0,
            CyIndex::Pair(a, b) => a == 0 && b == 0,
        }
    }
}

impl fmt::Display for CyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyIndex::Single(a) => write!(f, "{a}"),
            CyIndex::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

impl fmt::Display for CyWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            CyWeights::Projective { n, n_odd } => write!(f, "projective {n} {n_odd}"),
            CyWeights::Weighted { even, odd } => write!(f, "weighted {} -- {}", join(even), join(odd)),
            CyWeights::Ambitwistor { n_odd } => write!(f, "ambitwistor {n_odd}"),
        }
    }
}

pub fn calabi_yau_index(w: &CyWeights) -> CyIndex {
    match w {
        CyWeights::Projective { n, n_odd } => CyIndex::Single(*n as i64 + 1 - *n_odd as i64),
        CyWeights::Weighted { even, odd } => CyIndex::Single(even.iter().sum::<i64>() - odd.iter().sum::<i64>()),
        CyWeights::Ambitwistor { n_odd } => {
            let c = 3 - *n_odd as i64;
            CyIndex::Pair(c, c)
        }
    }
}
