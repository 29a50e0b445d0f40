//! State descriptors for the `state` subcommand.
//!
//! A descriptor is `kind` or `kind:key=value,key=value`:
//!
//! | kind | keys |
//! |---|---|
//! | `vacuum` | `modes` |
//! | `coherent` | `gamma`, `pol` (`H`/`V`) |
//! | `cat` | `delta`, `phi`, `pol` |
//! | `xi` | `delta`, `phi`, `t0` |
//! | `lambda` | `n`, `delta`, `phi`, `t0`, `splits` (`/`-separated) |
//! | `hybrid-pqs1`, `bell-pqs1` | `delta`, `phi`, `t0`, `t` |
//! | `hybrid-pqs2`, `bell-pqs2` | `delta`, `phi`, `t0`, `gamma_abs` |
//! | `target-hybrid`, `target-bell` | `delta`, `phi`, `t0` |
//!
//! Every kind also accepts `cutoff`; by default it follows the tail rule
//! for δ√2 (or γ).

use std::collections::BTreeMap;

use pqs_core::fock::required_cutoff;
use pqs_core::scissors::{self, Scissors};
use pqs_core::sources::{self, SourceParams};
use pqs_core::{Polarization, PureState, MAX_TAIL_WEIGHT};

use crate::error::{HarnessError, Result};

/// Amplitudes below this are left out of dumps.
pub const DUMP_THRESHOLD: f64 = 1e-10;

struct Descriptor {
    kind: String,
    args: BTreeMap<String, String>,
}

impl Descriptor {
    fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text.trim().split_once(':').unwrap_or((text.trim(), ""));
        let mut args = BTreeMap::new();
        for pair in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("expected key=value, got {:?}", pair)))?;
            args.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Descriptor { kind: kind.to_string(), args })
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.args.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| HarnessError::Config(format!("{}: bad number {:?}", key, v))),
        }
    }

    fn pol(&self) -> Result<Polarization> {
        match self.args.get("pol").map(String::as_str) {
            None | Some("H") => Ok(Polarization::H),
            Some("V") => Ok(Polarization::V),
            Some(p) => Err(HarnessError::Config(format!("bad polarization {:?}", p))),
        }
    }

    fn cutoff_for(&self, amplitude: f64) -> Result<u32> {
        match self.args.get("cutoff") {
            Some(c) => c.parse().map_err(|_| HarnessError::Config(format!("bad cutoff {:?}", c))),
            None => Ok(required_cutoff(amplitude, MAX_TAIL_WEIGHT).max(2)),
        }
    }

    fn params(&self) -> Result<SourceParams> {
        let delta = self.f64_or("delta", 1.0)?;
        let mut p = SourceParams::new(delta, self.f64_or("phi", 0.0)?, self.f64_or("t0", 0.5)?)
            .with_cutoff(self.cutoff_for(delta * 2f64.sqrt())?);
        if let Some(s) = self.args.get("splits") {
            p.split_ts = s
                .split('/')
                .map(|x| x.parse().map_err(|_| HarnessError::Config(format!("bad split {:?}", x))))
                .collect::<Result<_>>()?;
        }
        Ok(p)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.args.keys() {
            if k != "cutoff" && !allowed.contains(&k.as_str()) {
                return Err(HarnessError::Config(format!("{} does not take {:?}", self.kind, k)));
            }
        }
        Ok(())
    }
}

const SOURCE_KEYS: [&str; 3] = ["delta", "phi", "t0"];

/// Builds the normalized state named by `descriptor`.
pub fn build_state(descriptor: &str) -> Result<PureState> {
    let d = Descriptor::parse(descriptor)?;
    let heralded = |prep: scissors::Preparation| prep.state.ok_or(pqs_core::Error::ZeroProbability);
    let state = match d.kind.as_str() {
        "vacuum" => {
            d.check_keys(&["modes"])?;
            let modes = d.f64_or("modes", 1.0)?;
            if modes < 1.0 || modes.fract() != 0.0 {
                return Err(HarnessError::Config(format!("bad mode count {}", modes)));
            }
            PureState::vacuum(modes as usize, d.cutoff_for(0.0)?)?
        }
        "coherent" => {
            d.check_keys(&["gamma", "pol"])?;
            let g = d.f64_or("gamma", 1.0)?;
            sources::coherent(g, d.pol()?, d.cutoff_for(g.abs())?)?
        }
        "cat" => {
            d.check_keys(&["delta", "phi", "pol"])?;
            let delta = d.f64_or("delta", 1.0)?;
            sources::cat(delta, d.f64_or("phi", 0.0)?, d.pol()?, d.cutoff_for(delta)?)?
        }
        "xi" => {
            d.check_keys(&SOURCE_KEYS)?;
            sources::xi_direct(&d.params()?)?
        }
        "lambda" => {
            d.check_keys(&["delta", "phi", "t0", "n", "splits"])?;
            let n = d.f64_or("n", 3.0)? as usize;
            sources::lambda_state(&d.params()?, n)?
        }
        "hybrid-pqs1" | "bell-pqs1" => {
            d.check_keys(&["delta", "phi", "t0", "t"])?;
            let s = Scissors::Pqs1 { t: d.f64_or("t", 0.5)? };
            let p = d.params()?;
            heralded(if d.kind.starts_with("hybrid") {
                scissors::prepare_hybrid(&p, s)?
            } else {
                scissors::prepare_bell(&p, s)?
            })?
        }
        "hybrid-pqs2" | "bell-pqs2" => {
            d.check_keys(&["delta", "phi", "t0", "gamma_abs"])?;
            let s = Scissors::pqs2(d.f64_or("gamma_abs", 0.05)?);
            let p = d.params()?;
            heralded(if d.kind.starts_with("hybrid") {
                scissors::prepare_hybrid(&p, s)?
            } else {
                scissors::prepare_bell(&p, s)?
            })?
        }
        "target-hybrid" => {
            d.check_keys(&SOURCE_KEYS)?;
            sources::hybrid_target(&d.params()?)?
        }
        "target-bell" => {
            d.check_keys(&SOURCE_KEYS)?;
            let p = d.params()?;
            sources::bell_target(p.phi, p.cutoff)?
        }
        other => return Err(HarnessError::Config(format!("unknown state kind {:?}", other))),
    };
    Ok(state)
}

/// Canonical dump of the state named by `descriptor`.
pub fn dump_state(descriptor: &str) -> Result<String> {
    Ok(build_state(descriptor)?.dump(DUMP_THRESHOLD))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_dump_is_one_row() {
        assert_eq!(dump_state("vacuum").unwrap(), format!("m0:(0,0) {:.17e} {:.17e}\n", 1.0, 0.0));
        assert_eq!(dump_state("vacuum:modes=2").unwrap().lines().count(), 1);
    }

    #[test]
    fn xi_pair_row() {
        let dump = dump_state("xi:delta=1,phi=0,t0=0.5").unwrap();
        let row = dump.lines().find(|l| l.starts_with("m0:(1,0);m1:(1,0) ")).unwrap();
        let re: f64 = row.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!((re - 0.2441341045635754).abs() < 1e-12, "{}", re);
        assert_eq!(dump, dump_state("xi:delta=1,phi=0,t0=0.5").unwrap());
    }

    #[test]
    fn prepared_states_are_dumpable() {
        for d in [
            "hybrid-pqs1:delta=0.8,t=0.9",
            "bell-pqs2:delta=0.8,gamma_abs=0.07",
            "lambda:n=3,delta=0.5,splits=0.5",
            "target-bell:phi=1",
            "cat:delta=0.5,phi=3.14159,pol=V",
        ] {
            let s = build_state(d).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10, "{}", d);
        }
    }

    #[test]
    fn rejects_bad_descriptors() {
        for d in ["squeezed", "xi:delta", "xi:t=0.5", "coherent:pol=D", "xi:delta=2,cutoff=10"] {
            assert!(build_state(d).is_err(), "{}", d);
        }
        assert_eq!(build_state("xi:delta=2,cutoff=10").unwrap_err().exit_code(), 3);
    }
}
