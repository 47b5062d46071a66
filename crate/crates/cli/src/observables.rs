//! Closed observable vocabulary shared by the point, sweep and preset
//! commands, plus the per-configuration evaluator.

use std::fmt;
use trichain::measures::{
    gaussian_discord_left, gaussian_discord_right, log_negativity, optimize_criterion,
    reduce_two_mode, simon_witness, CriterionSpec, OptimizerBudget,
};
use trichain::model::Site;
use trichain::steady::CovarianceMatrix;
use trichain::{transport, Engine};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// All 21 independent covariance entries.
    FullCovariance,
    CurrentCl,
    CurrentRc,
    CurrentTotal,
    InteractionEnergy,
    /// K_JJ over the τ grid supplied at evaluation time.
    CurrentAutocorrelation,
    /// K_JJ at one explicit lag.
    CurrentAutocorrelationAt(f64),
    LogNegativity(Site, Site),
    DiscordLeft(Site, Site),
    DiscordRight(Site, Site),
    Simon(Site, Site),
    T23,
    T33,
}

fn parse_site(s: &str) -> Result<Site, String> {
    match s.trim() {
        "L" => Ok(Site::Left),
        "C" => Ok(Site::Center),
        "R" => Ok(Site::Right),
        other => Err(format!("unknown site `{other}` (expected L, C or R)")),
    }
}

fn parse_pair(args: &str, name: &str) -> Result<(Site, Site), String> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("{name} needs a pair like (L,R)"));
    }
    let i = parse_site(parts[0])?;
    let j = parse_site(parts[1])?;
    if i == j {
        return Err(format!("{name} needs two distinct sites"));
    }
    Ok((i, j))
}

impl Observable {
    /// Parse one vocabulary entry: V, j_CL, j_RC, J, H_int, K_JJ, K_JJ(τ),
    /// E_N(i,j), D_left(i,j), D_right(i,j), simon(i,j), T23, T33.
    pub fn parse(token: &str) -> Result<Observable, String> {
        let t = token.trim();
        match t {
            "V" => return Ok(Observable::FullCovariance),
            "j_CL" => return Ok(Observable::CurrentCl),
            "j_RC" => return Ok(Observable::CurrentRc),
            "J" => return Ok(Observable::CurrentTotal),
            "H_int" => return Ok(Observable::InteractionEnergy),
            "K_JJ" => return Ok(Observable::CurrentAutocorrelation),
            "T23" => return Ok(Observable::T23),
            "T33" => return Ok(Observable::T33),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("K_JJ(").and_then(|r| r.strip_suffix(')')) {
            let tau: f64 = rest
                .trim()
                .parse()
                .map_err(|_| format!("bad lag in `{t}`"))?;
            return Ok(Observable::CurrentAutocorrelationAt(tau));
        }
        for (prefix, ctor) in [
            ("E_N(", Observable::LogNegativity as fn(Site, Site) -> Observable),
            ("D_left(", Observable::DiscordLeft),
            ("D_right(", Observable::DiscordRight),
            ("simon(", Observable::Simon),
        ] {
            if let Some(rest) = t.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) {
                let (i, j) = parse_pair(rest, t)?;
                return Ok(ctor(i, j));
            }
        }
        Err(format!(
            "unknown observable `{t}`; expected one of V, j_CL, j_RC, J, H_int, K_JJ, \
             K_JJ(τ), E_N(i,j), D_left(i,j), D_right(i,j), simon(i,j), T23, T33"
        ))
    }

    pub fn parse_list(list: &str) -> Result<Vec<Observable>, String> {
        // Observable tokens contain commas inside parentheses, so split at
        // top level only.
        let mut out = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        for (idx, ch) in list.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    if !list[start..idx].trim().is_empty() {
                        out.push(Observable::parse(&list[start..idx])?);
                    }
                    start = idx + 1;
                }
                _ => {}
            }
        }
        if !list[start..].trim().is_empty() {
            out.push(Observable::parse(&list[start..])?);
        }
        if out.is_empty() {
            return Err("no observables given".into());
        }
        Ok(out)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let site = |s: Site| match s {
            Site::Left => "L",
            Site::Center => "C",
            Site::Right => "R",
        };
        match self {
            Observable::FullCovariance => write!(f, "V"),
            Observable::CurrentCl => write!(f, "j_CL"),
            Observable::CurrentRc => write!(f, "j_RC"),
            Observable::CurrentTotal => write!(f, "J"),
            Observable::InteractionEnergy => write!(f, "H_int"),
            Observable::CurrentAutocorrelation => write!(f, "K_JJ"),
            Observable::CurrentAutocorrelationAt(tau) => write!(f, "K_JJ({tau})"),
            Observable::LogNegativity(i, j) => write!(f, "E_N({},{})", site(*i), site(*j)),
            Observable::DiscordLeft(i, j) => write!(f, "D_left({},{})", site(*i), site(*j)),
            Observable::DiscordRight(i, j) => write!(f, "D_right({},{})", site(*i), site(*j)),
            Observable::Simon(i, j) => write!(f, "simon({},{})", site(*i), site(*j)),
            Observable::T23 => write!(f, "T23"),
            Observable::T33 => write!(f, "T33"),
        }
    }
}

/// Criterion data and optimizer controls used by T23/T33 observables.
pub struct MeasureContext {
    pub t23: CriterionSpec,
    pub t33: CriterionSpec,
    pub budget: OptimizerBudget,
}

impl MeasureContext {
    pub fn with_seed(seed: u64) -> MeasureContext {
        MeasureContext {
            t23: CriterionSpec::bipartite_three_mode(),
            t33: CriterionSpec::genuine_tripartite(),
            budget: OptimizerBudget {
                seed,
                ..OptimizerBudget::default()
            },
        }
    }

    /// Replace whichever spec matches the file's κ.
    pub fn load_override(&mut self, path: &std::path::Path) -> Result<(), String> {
        let spec = CriterionSpec::from_path(path).map_err(|e| e.to_string())?;
        match spec.kappa {
            2 => self.t23 = spec,
            3 => self.t33 = spec,
            k => return Err(format!("criterion file has unsupported κ = {k}")),
        }
        Ok(())
    }
}

const SIX_LABELS: [&str; 6] = ["x_L", "x_C", "x_R", "p_L", "p_C", "p_R"];

/// Column labels an observable expands to.
pub fn columns(obs: &Observable, tau_grid: &[f64]) -> Vec<String> {
    match obs {
        Observable::FullCovariance => {
            let mut cols = Vec::with_capacity(21);
            for r in 0..6 {
                for c in r..6 {
                    cols.push(format!("V[{},{}]", SIX_LABELS[r], SIX_LABELS[c]));
                }
            }
            cols
        }
        Observable::CurrentAutocorrelation => tau_grid
            .iter()
            .map(|tau| format!("K_JJ({tau})"))
            .collect(),
        other => vec![other.to_string()],
    }
}

/// Evaluate one observable on a solved configuration.
pub fn evaluate(
    obs: &Observable,
    engine: &Engine,
    cov: &CovarianceMatrix,
    tau_grid: &[f64],
    ctx: &MeasureContext,
) -> Result<Vec<f64>, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match obs {
        Observable::FullCovariance => {
            let mut vals = Vec::with_capacity(21);
            for r in 0..6 {
                for c in r..6 {
                    vals.push(cov.matrix()[(r, c)]);
                }
            }
            Ok(vals)
        }
        Observable::CurrentCl => {
            Ok(vec![transport::mean_pair_current(engine, Site::Center, Site::Left)
                .map_err(|e| err(&e))?])
        }
        Observable::CurrentRc => {
            Ok(vec![transport::mean_pair_current(engine, Site::Right, Site::Center)
                .map_err(|e| err(&e))?])
        }
        Observable::CurrentTotal => Ok(vec![transport::total_current(engine).map_err(|e| err(&e))?]),
        Observable::InteractionEnergy => {
            Ok(vec![transport::interaction_energy(engine).map_err(|e| err(&e))?])
        }
        Observable::CurrentAutocorrelation => {
            let mut vals = Vec::with_capacity(tau_grid.len());
            for &tau in tau_grid {
                vals.push(
                    transport::total_current_correlation(engine, tau).map_err(|e| err(&e))?,
                );
            }
            Ok(vals)
        }
        Observable::CurrentAutocorrelationAt(tau) => {
            Ok(vec![transport::total_current_correlation(engine, *tau)
                .map_err(|e| err(&e))?])
        }
        Observable::LogNegativity(i, j) => {
            let st = reduce_two_mode(cov, *i, *j).map_err(|e| err(&e))?;
            Ok(vec![log_negativity(&st).map_err(|e| err(&e))?])
        }
        Observable::DiscordLeft(i, j) => {
            let st = reduce_two_mode(cov, *i, *j).map_err(|e| err(&e))?;
            Ok(vec![gaussian_discord_left(&st).map_err(|e| err(&e))?])
        }
        Observable::DiscordRight(i, j) => {
            let st = reduce_two_mode(cov, *i, *j).map_err(|e| err(&e))?;
            Ok(vec![gaussian_discord_right(&st).map_err(|e| err(&e))?])
        }
        Observable::Simon(i, j) => {
            let st = reduce_two_mode(cov, *i, *j).map_err(|e| err(&e))?;
            Ok(vec![simon_witness(&st).0])
        }
        Observable::T23 => {
            let r = optimize_criterion(cov, &ctx.t23, &ctx.budget).map_err(|e| err(&e))?;
            Ok(vec![r.value])
        }
        Observable::T33 => {
            let r = optimize_criterion(cov, &ctx.t33, &ctx.budget).map_err(|e| err(&e))?;
            Ok(vec![r.value])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_vocabulary() {
        let list = "V,j_CL,J,H_int,K_JJ(2.5),E_N(L,R),D_right(R,C),simon(L,C),T33";
        let parsed = Observable::parse_list(list).unwrap();
        assert_eq!(parsed.len(), 9);
        assert_eq!(parsed[5], Observable::LogNegativity(Site::Left, Site::Right));
        assert!(Observable::parse("E_N(L,L)").is_err());
        assert!(Observable::parse("entropy").is_err());
        assert!(Observable::parse_list("").is_err());
    }

    #[test]
    fn covariance_columns_count() {
        assert_eq!(columns(&Observable::FullCovariance, &[]).len(), 21);
        assert_eq!(
            columns(&Observable::CurrentAutocorrelation, &[0.0, 1.0]).len(),
            2
        );
    }
}
