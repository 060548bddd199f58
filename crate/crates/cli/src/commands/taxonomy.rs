use std::collections::BTreeMap;
use std::str::FromStr;

use hodge_core::taxonomy::{
    admissible_groups, check_betti, random_params, reality_rule, solve_group, GroupLabel, GroupParams, Scalar,
    SolutionView,
};
use num::rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{CliError, CliResult, Common, Report};

pub struct TaxonomyArgs<'a> {
    pub m: usize,
    pub s: usize,
    pub betti: usize,
    pub group: Option<&'a str>,
    pub params: Option<&'a str>,
    pub draws: usize,
}

pub fn run(c: &Common, args: &TaxonomyArgs<'_>, report: &mut Report) -> CliResult<()> {
    check_betti(args.betti)?;
    let (m, s) = (args.m, args.s);
    let d_odd = (m * m + s) % 2 == 1;
    report.data("reality", reality_rule(args.betti, d_odd)?);
    let admissible = admissible_groups(m, s);
    report.data("admissible", &admissible);

    let mut solutions: Vec<SolutionView> = Vec::new();
    match (args.group, args.params) {
        (Some(g), Some(p)) => {
            let group = GroupLabel::from_str(g)?;
            let params = parse_params(p)?;
            let view = match build::<BigRational>(group, &params) {
                Ok(exact) => solve_group(m, s, &exact)?.view(true),
                Err(_) => solve_group(m, s, &build::<f64>(group, &params)?)?.view(false),
            };
            solutions.push(view);
        }
        (group, None) => {
            let groups = match group {
                Some(g) => vec![GroupLabel::from_str(g)?],
                None => admissible.clone(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            for g in groups {
                for _ in 0..args.draws {
                    let params = random_params(g, s, &mut rng);
                    solutions.push(solve_group(m, s, &params)?.view(true));
                }
            }
        }
        (None, Some(_)) => return Err(CliError::Usage("--params needs --group".into())),
    }

    for (i, sol) in solutions.iter().enumerate() {
        let det_err = match sol.expected_det {
            Some(d) => (sol.det_t - f64::from(d)).abs(),
            None => (sol.det_t.abs() - 1.0).abs(),
        };
        report.check(format!("{}/{i}/constraints", sol.group), sol.constraints_residual, 1e-12);
        report.check(format!("{}/{i}/det_T", sol.group), det_err, 1e-12);
    }
    report.data("solutions", &solutions);
    Ok(())
}

/// `name=value` pairs separated by commas.
fn parse_params(text: &str) -> CliResult<BTreeMap<String, String>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (k, v) =
                pair.split_once('=').ok_or_else(|| CliError::Usage(format!("parameter {pair:?} is not name=value")))?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

trait ParseScalar: Scalar {
    fn parse(text: &str) -> Option<Self>;
}

impl ParseScalar for f64 {
    fn parse(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
            None => text.parse().ok(),
        }
    }
}

impl ParseScalar for BigRational {
    fn parse(text: &str) -> Option<Self> {
        BigRational::from_str(text).ok()
    }
}

fn build<T: ParseScalar>(group: GroupLabel, params: &BTreeMap<String, String>) -> CliResult<GroupParams<T>> {
    let value = |k: &str| -> CliResult<T> {
        let raw = params.get(k).ok_or_else(|| CliError::Usage(format!("{group} needs parameter {k}")))?;
        T::parse(raw).ok_or_else(|| CliError::Usage(format!("cannot parse {k}={raw}")))
    };
    let sign = |k: &str| -> CliResult<i8> {
        match params.get(k).map(String::as_str) {
            None | Some("1") | Some("+1") | Some("+") => Ok(1),
            Some("-1") | Some("-") => Ok(-1),
            Some(other) => Err(CliError::Usage(format!("{k} must be +1 or -1, got {other}"))),
        }
    };
    Ok(match group {
        GroupLabel::S211 => GroupParams::S211 { e12: value("e12")?, l11: value("l11")? },
        GroupLabel::S212 => GroupParams::S212 { e12: value("e12")?, sign: sign("sign")? },
        GroupLabel::S213 => GroupParams::S213 { e12: value("e12")?, l11: value("l11")?, l12: value("l12")? },
        GroupLabel::S221 => {
            GroupParams::S221 { e11: value("e11")?, e22: value("e22")?, sign1: sign("sign1")?, sign2: sign("sign2")? }
        }
        GroupLabel::S222 => {
            GroupParams::S222 { e11: value("e11")?, e22: value("e22")?, l12: value("l12")?, sign: sign("sign")? }
        }
    })
}
