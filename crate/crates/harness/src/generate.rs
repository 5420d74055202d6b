//! Named and pinwheel instance generators.

use std::fmt;
use std::str::FromStr;

use lsd_core::instances::{anti_kleinberg, appendix_c, pinwheel, sec4, tight, InstanceError};
use lsd_core::RewardTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedInstance {
    Sec4,
    AppendixC,
    Tight,
    AntiKleinberg,
    Pinwheel,
}

impl FromStr for NamedInstance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sec4" => Ok(Self::Sec4),
            "appendix-c" | "appendix_c" | "appendixC" => Ok(Self::AppendixC),
            "tight" => Ok(Self::Tight),
            "anti-kleinberg" | "anti_kleinberg" => Ok(Self::AntiKleinberg),
            "pinwheel" => Ok(Self::Pinwheel),
            other => Err(format!(
                "unknown instance `{other}`, expected sec4, appendix-c, tight, anti-kleinberg or pinwheel"
            )),
        }
    }
}

impl fmt::Display for NamedInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sec4 => "sec4",
            Self::AppendixC => "appendix-c",
            Self::Tight => "tight",
            Self::AntiKleinberg => "anti-kleinberg",
            Self::Pinwheel => "pinwheel",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub k: usize,
    pub eps: f64,
    pub delays: Vec<usize>,
    pub dense_check: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            k: 3,
            eps: 0.01,
            delays: vec![2, 4, 4],
            dense_check: true,
        }
    }
}

pub fn generate(name: NamedInstance, p: &GenParams) -> Result<RewardTable, InstanceError> {
    match name {
        NamedInstance::Sec4 => Ok(sec4()),
        NamedInstance::AppendixC => Ok(appendix_c()),
        NamedInstance::Tight => tight(p.k),
        NamedInstance::AntiKleinberg => anti_kleinberg(p.eps),
        NamedInstance::Pinwheel => pinwheel(&p.delays, p.dense_check),
    }
}

pub fn parse_delays(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad delay `{x}`: {e}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lsd_core::blocks::cyclic_average;
    use lsd_core::Block;

    #[test]
    fn names_round_trip() {
        for n in ["sec4", "appendix-c", "tight", "anti-kleinberg", "pinwheel"] {
            assert_eq!(n.parse::<NamedInstance>().unwrap().to_string(), n);
        }
        assert!("sec5".parse::<NamedInstance>().is_err());
    }

    #[test]
    fn pinwheel_schedules() {
        let p = GenParams::default();
        let t = generate(NamedInstance::Pinwheel, &p).unwrap();
        assert_eq!(t.arms(), 4);
        let b = Block::new(vec![0, 1, 0, 2], 4).unwrap();
        assert!((cyclic_average(&b, &t) - 1.0).abs() < 1e-12);

        let p3 = GenParams {
            delays: vec![3, 3, 3],
            ..p.clone()
        };
        let t3 = generate(NamedInstance::Pinwheel, &p3).unwrap();
        assert!((cyclic_average(&Block::new(vec![0, 1, 2], 4).unwrap(), &t3) - 1.0).abs() < 1e-12);

        let sparse = GenParams {
            delays: vec![2, 3],
            ..p.clone()
        };
        assert!(matches!(
            generate(NamedInstance::Pinwheel, &sparse),
            Err(InstanceError::NotDense(_))
        ));
        let unchecked = GenParams {
            dense_check: false,
            ..sparse
        };
        assert_eq!(
            generate(NamedInstance::Pinwheel, &unchecked)
                .unwrap()
                .arms(),
            3
        );
    }

    #[test]
    fn parameter_errors() {
        let bad = GenParams {
            k: 1,
            eps: 1.5,
            ..Default::default()
        };
        assert!(generate(NamedInstance::Tight, &bad).is_err());
        assert!(generate(NamedInstance::AntiKleinberg, &bad).is_err());
        assert_eq!(parse_delays("2, 4,4").unwrap(), vec![2, 4, 4]);
        assert!(parse_delays("2,x").is_err());
    }
}
