use super::IoError;
use crate::model::Instance;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    /// Values in {0, 1}.
    Binary,
    /// At most `k` distinct values per row.
    Kary(usize),
    /// Every value at least 1.
    Positive,
    /// Every agent has the same row.
    Identical,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Random => write!(f, "random"),
            Family::Binary => write!(f, "binary"),
            Family::Kary(k) => write!(f, "kary({k})"),
            Family::Positive => write!(f, "positive"),
            Family::Identical => write!(f, "identical"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    /// Accepts `random`, `binary`, `positive`, `identical`, `kary(K)` and `kary:K`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "random" => return Ok(Family::Random),
            "binary" => return Ok(Family::Binary),
            "positive" => return Ok(Family::Positive),
            "identical" => return Ok(Family::Identical),
            _ => {}
        }
        let k = s
            .strip_prefix("kary(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("kary:"))
            .ok_or_else(|| format!("unknown family '{s}'"))?;
        k.parse::<usize>()
            .map(Family::Kary)
            .map_err(|_| format!("bad k in '{s}'"))
    }
}

impl Family {
    /// Whether `instance` belongs to the family.
    pub fn admits(&self, instance: &Instance) -> bool {
        let rows = instance.rows();
        match self {
            Family::Random => true,
            Family::Binary => instance.is_binary(),
            Family::Kary(k) => instance.arity() <= *k,
            Family::Positive => instance.is_positive_instance(),
            Family::Identical => rows.iter().all(|r| r == &rows[0]),
        }
    }
}

/// Deterministic for fixed arguments. All-zero rows and columns are
/// repaired inside the family so the result always validates.
pub fn generate(family: Family, agents: usize, goods: usize, vmax: u64, seed: u64) -> Result<Instance, IoError> {
    if agents == 0 || goods == 0 || vmax == 0 {
        return Err(IoError::InvalidParams(format!(
            "agents, goods and vmax must be positive (got {agents}, {goods}, {vmax})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<Vec<u64>> = match family {
        Family::Random => (0..agents)
            .map(|_| (0..goods).map(|_| rng.gen_range(0..=vmax)).collect())
            .collect(),
        Family::Binary => (0..agents)
            .map(|_| (0..goods).map(|_| rng.gen_range(0..=1)).collect())
            .collect(),
        Family::Positive => (0..agents)
            .map(|_| (0..goods).map(|_| rng.gen_range(1..=vmax)).collect())
            .collect(),
        Family::Identical => {
            let row: Vec<u64> = (0..goods).map(|_| rng.gen_range(0..=vmax)).collect();
            vec![row; agents]
        }
        Family::Kary(k) => {
            if k == 0 || k as u64 > vmax + 1 {
                return Err(IoError::InvalidParams(format!(
                    "k must lie in [1, vmax + 1] (got k={k}, vmax={vmax})"
                )));
            }
            (0..agents)
                .map(|_| {
                    let mut palette: Vec<u64> = sample(&mut rng, vmax as usize + 1, k)
                        .into_iter()
                        .map(|v| v as u64)
                        .collect();
                    if palette.iter().all(|&v| v == 0) {
                        palette[0] = rng.gen_range(1..=vmax);
                    }
                    (0..goods).map(|_| palette[rng.gen_range(0..k)]).collect()
                })
                .collect()
        }
    };
    repair(&mut values, family, vmax, &mut rng);
    let instance = Instance::from_values(values)?;
    debug_assert!(family.admits(&instance));
    Ok(instance)
}

/// A positive value for a row that keeps it inside the family.
fn positive_value(row: &[u64], family: Family, vmax: u64, rng: &mut ChaCha8Rng) -> u64 {
    match family {
        Family::Binary => 1,
        Family::Kary(_) => {
            let used: Vec<u64> = row.iter().copied().filter(|&v| v > 0).collect();
            used[rng.gen_range(0..used.len())]
        }
        _ => rng.gen_range(1..=vmax),
    }
}

fn repair(values: &mut [Vec<u64>], family: Family, vmax: u64, rng: &mut ChaCha8Rng) {
    let agents = values.len();
    let goods = values[0].len();
    // rows first, so every row has a positive entry that columns can copy;
    // an all-zero k-ary row gains its second distinct value here
    for agent in 0..agents {
        if values[agent].iter().all(|&v| v == 0) {
            let good = rng.gen_range(0..goods);
            let v = match family {
                Family::Binary => 1,
                _ => rng.gen_range(1..=vmax),
            };
            if family == Family::Identical {
                values.iter_mut().for_each(|r| r[good] = v);
            } else {
                values[agent][good] = v;
            }
        }
    }
    for good in 0..goods {
        if values.iter().all(|r| r[good] == 0) {
            if family == Family::Identical {
                let v = rng.gen_range(1..=vmax);
                values.iter_mut().for_each(|r| r[good] = v);
            } else {
                let agent = rng.gen_range(0..agents);
                values[agent][good] = positive_value(&values[agent], family, vmax, rng);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = generate(Family::Binary, 2, 4, 1, 7).unwrap();
        let b = generate(Family::Binary, 2, 4, 1, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn families_hold() {
        for seed in 0..200 {
            for family in [
                Family::Random,
                Family::Binary,
                Family::Kary(2),
                Family::Kary(1),
                Family::Positive,
                Family::Identical,
            ] {
                let n = 1 + (seed as usize % 4);
                let m = 1 + (seed as usize % 7);
                let inst = generate(family, n, m, 5, seed).unwrap();
                assert!(family.admits(&inst), "{family} seed {seed}");
            }
        }
        let inst = generate(Family::Kary(2), 3, 6, 9, 3).unwrap();
        assert!(inst.rows().iter().all(|r| {
            let mut d = r.clone();
            d.sort_unstable();
            d.dedup();
            d.len() <= 2
        }));
        let inst = generate(Family::Positive, 3, 5, 4, 1).unwrap();
        assert!(inst.rows().iter().flatten().all(|&v| v >= 1));
    }

    #[test]
    fn parse_family_names() {
        assert_eq!("kary(3)".parse::<Family>(), Ok(Family::Kary(3)));
        assert_eq!("kary:2".parse::<Family>(), Ok(Family::Kary(2)));
        assert_eq!(Family::Kary(3).to_string(), "kary(3)");
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(generate(Family::Random, 0, 3, 5, 1).is_err());
        assert!(generate(Family::Kary(7), 2, 3, 5, 1).is_err());
    }
}
