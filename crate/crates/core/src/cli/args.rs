use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chains::{mutation_from_alpha, ChainSpec, State};
use crate::error::{Error, Result};
use crate::numerics::{parse_rational, ExactScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand that takes a chain.
#[derive(Clone, Debug, Default, Args)]
pub struct ChainArgs {
    /// polya-level | polya-downup | polya-updown | moran | hubbell | gibbs-dm |
    /// bl-level | bl-downup | bl-updown | ehrenfest | normal-ar
    #[arg(long)]
    pub chain: Option<String>,
    /// Population size
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Number of colors; broadcasts single-entry lists
    #[arg(long)]
    pub d: Option<usize>,
    /// Dirichlet parameters, e.g. `0.2x5` or `1/2,1,3`
    #[arg(long)]
    pub alpha: Option<String>,
    /// Mutation or Ehrenfest distribution, e.g. `0.2x5`
    #[arg(long)]
    pub p: Option<String>,
    /// Mutation probability
    #[arg(long)]
    pub m: Option<String>,
    /// Individuals replaced per step
    #[arg(long)]
    pub s: Option<u64>,
    /// Urn capacities for the Bernoulli-Laplace chains, e.g. `20,20`
    #[arg(long = "l")]
    pub caps: Option<String>,
    /// AR coefficient matrix file
    #[arg(long = "A")]
    pub a_file: Option<PathBuf>,
    /// AR stationary covariance file
    #[arg(long = "sigma-file")]
    pub sigma_file: Option<PathBuf>,
    /// `Ne1`, explicit counts `3,0,1`, or `0` (AR)
    #[arg(long)]
    pub start: Option<String>,
}

/// Output destination and rendering.
#[derive(Clone, Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output if absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Expands `a,bxk,c` into `[a, b (k times), c]`.
pub fn expand_list(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match item.rsplit_once(['x', '*']) {
            Some((v, k)) => {
                let k: usize = k.trim().parse().map_err(|_| usage(format!("bad repeat count in {item:?}")))?;
                out.extend(std::iter::repeat_n(v.trim().to_string(), k));
            }
            None => out.push(item.to_string()),
        }
    }
    if out.is_empty() {
        return Err(usage(format!("empty list {s:?}")));
    }
    Ok(out)
}

fn broadcast<T: Clone>(v: Vec<T>, d: Option<usize>, name: &str) -> Result<Vec<T>> {
    match d {
        Some(d) if v.len() == 1 => Ok(vec![v[0].clone(); d]),
        Some(d) if v.len() != d => Err(usage(format!("--{name} has {} entries but --d is {d}", v.len()))),
        _ => Ok(v),
    }
}

pub fn parse_rationals(s: &str, d: Option<usize>, name: &str) -> Result<Vec<ExactScalar>> {
    let v = expand_list(s)?.iter().map(|t| parse_rational(t)).collect::<Result<Vec<_>>>()?;
    broadcast(v, d, name)
}

pub fn parse_counts(s: &str, d: Option<usize>, name: &str) -> Result<Vec<u64>> {
    let v = expand_list(s)?
        .iter()
        .map(|t| t.parse::<u64>().map_err(|_| usage(format!("--{name}: {t:?} is not a count"))))
        .collect::<Result<Vec<_>>>()?;
    broadcast(v, d, name)
}

/// Plain-text matrix: `rows cols` then row-major doubles.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut tokens = text.split_whitespace();
    let mut dim = || -> Result<usize> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("expected `rows cols` header".into()))
    };
    let (rows, cols) = (dim()?, dim()?);
    let values = tokens
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != rows * cols {
        return Err(Error::Parse(format!("expected {} entries, found {}", rows * cols, values.len())));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut s = format!("{} {}\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:e}", m[(r, c)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

impl ChainArgs {
    fn need_n(&self) -> Result<u64> {
        self.n.ok_or_else(|| usage("--N is required"))
    }

    fn s_or_one(&self) -> u64 {
        self.s.unwrap_or(1)
    }

    fn alpha(&self) -> Result<Vec<ExactScalar>> {
        let a = self.alpha.as_deref().ok_or_else(|| usage("--alpha is required"))?;
        parse_rationals(a, self.d, "alpha")
    }

    fn p_or_uniform(&self) -> Result<Vec<ExactScalar>> {
        match (&self.p, self.d) {
            (Some(p), d) => parse_rationals(p, d, "p"),
            (None, Some(d)) if d > 0 => Ok(vec![ExactScalar::new(1.into(), (d as u64).into()); d]),
            _ => Err(usage("--p or --d is required")),
        }
    }

    fn caps(&self) -> Result<Vec<u64>> {
        let l = self.caps.as_deref().ok_or_else(|| usage("--l is required"))?;
        parse_counts(l, self.d, "l")
    }

    /// Moran and Hubbell take either `--m` with `--p`/`--d`, or `--alpha`.
    fn mutation(&self, k: u64) -> Result<(ExactScalar, Vec<ExactScalar>)> {
        match (&self.m, &self.alpha) {
            (Some(m), None) => Ok((parse_rational(m)?, self.p_or_uniform()?)),
            (None, Some(_)) => Ok(mutation_from_alpha(k, &self.alpha()?)),
            (Some(_), Some(_)) => Err(usage("give either --m or --alpha, not both")),
            (None, None) => Err(usage("--m (with --p or --d) or --alpha is required")),
        }
    }

    pub fn spec(&self) -> Result<ChainSpec> {
        let chain = self.chain.as_deref().ok_or_else(|| usage("--chain is required"))?;
        let spec = match chain {
            "polya-level" => ChainSpec::PolyaLevel { n: self.need_n()?, alpha: self.alpha()?, s: self.s_or_one() },
            "polya-downup" => ChainSpec::PolyaDownUp { n: self.need_n()?, alpha: self.alpha()?, s: self.s_or_one() },
            "polya-updown" => ChainSpec::PolyaUpDown { n: self.need_n()?, alpha: self.alpha()?, s: self.s_or_one() },
            "moran" => {
                let n = self.need_n()?;
                let (m, p) = self.mutation(n)?;
                ChainSpec::Moran { n, m, p }
            }
            "hubbell" => {
                let n = self.need_n()?;
                let (m, p) = self.mutation(n.saturating_sub(1))?;
                ChainSpec::Hubbell { n, m, p }
            }
            "gibbs-dm" => ChainSpec::GibbsDm { n: self.need_n()?, alpha: self.alpha()? },
            "bl-level" => ChainSpec::BlLevel { caps: self.caps()?, n: self.need_n()?, s: self.s_or_one() },
            "bl-downup" => ChainSpec::BlDownUp { caps: self.caps()?, n: self.need_n()?, s: self.s_or_one() },
            "bl-updown" => ChainSpec::BlUpDown { caps: self.caps()?, n: self.need_n()?, s: self.s_or_one() },
            "ehrenfest" => ChainSpec::Ehrenfest { n: self.need_n()?, p: self.p_or_uniform()?, s: self.s_or_one() },
            "normal-ar" => {
                let a = read_matrix(self.a_file.as_deref().ok_or_else(|| usage("--A is required"))?)?;
                let sigma = read_matrix(self.sigma_file.as_deref().ok_or_else(|| usage("--sigma-file is required"))?)?;
                ChainSpec::NormalAr { a, sigma }
            }
            other => return Err(usage(format!("unknown chain {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Start state; defaults to `N e_1` (finite) or the origin (AR).
    pub fn start(&self, spec: &ChainSpec) -> Result<State> {
        let text = self.start.as_deref().map(str::trim);
        if let ChainSpec::NormalAr { a, .. } = spec {
            let d = a.nrows();
            return match text {
                None | Some("0") => Ok(State::Point(DVector::zeros(d))),
                Some(t) => {
                    let v = expand_list(t)?
                        .iter()
                        .map(|x| x.parse::<f64>().map_err(|_| usage(format!("--start: bad coordinate {x:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    let v = broadcast(v, Some(d), "start")?;
                    Ok(State::Point(DVector::from_vec(v)))
                }
            };
        }
        let pop = spec.population();
        let d = spec.dim();
        let counts = match text {
            None => corner(pop, d, 0),
            Some(t) if t.starts_with("Ne") => {
                let i: usize = t[2..].parse().map_err(|_| usage(format!("--start: bad corner {t:?}")))?;
                if i == 0 || i > d {
                    return Err(usage(format!("--start: color {i} out of 1..={d}")));
                }
                corner(pop, d, i - 1)
            }
            Some(t) => parse_counts(t, Some(d), "start")?,
        };
        if !spec.contains(&counts) {
            return Err(Error::Domain(format!("--start {counts:?} is not a state of this chain")));
        }
        Ok(State::Counts(counts))
    }
}

fn corner(pop: u64, d: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; d];
    v[i] = pop;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(chain: &str) -> ChainArgs {
        ChainArgs { chain: Some(chain.into()), n: Some(20), ..Default::default() }
    }

    #[test]
    fn list_grammar() {
        assert_eq!(expand_list("0.2x5").unwrap(), vec!["0.2"; 5]);
        assert_eq!(expand_list("1/2, 1x2 ,3").unwrap(), vec!["1/2", "1", "1", "3"]);
        assert!(expand_list("1xq").is_err());
        assert!(expand_list("").is_err());
    }

    #[test]
    fn moran_from_alpha_flags() {
        let mut a = args("moran");
        a.alpha = Some("0.2x5".into());
        let spec = a.spec().unwrap();
        assert_eq!(spec.dm_alpha().unwrap(), vec![parse_rational("0.2").unwrap(); 5]);
        a.m = Some("0.1".into());
        assert!(a.spec().is_err());
    }

    #[test]
    fn broadcast_with_d() {
        let mut a = args("ehrenfest");
        a.d = Some(4);
        let spec = a.spec().unwrap();
        assert_eq!(spec.dim(), 4);
        a.p = Some("0.5,0.5".into());
        assert!(a.spec().is_err());
    }

    #[test]
    fn starts() {
        let mut a = args("gibbs-dm");
        a.alpha = Some("1x3".into());
        let spec = a.spec().unwrap();
        assert_eq!(a.start(&spec).unwrap(), State::Counts(vec![20, 0, 0]));
        a.start = Some("Ne3".into());
        assert_eq!(a.start(&spec).unwrap(), State::Counts(vec![0, 0, 20]));
        a.start = Some("10,5,5".into());
        assert_eq!(a.start(&spec).unwrap(), State::Counts(vec![10, 5, 5]));
        a.start = Some("10,5,4".into());
        assert!(a.start(&spec).is_err());
        a.start = Some("Ne4".into());
        assert!(a.start(&spec).is_err());
    }

    #[test]
    fn matrix_files() {
        let m = parse_matrix("2 2\n1 0.5\n0.5 2\n").unwrap();
        assert_eq!(m[(0, 1)], 0.5);
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        assert!(parse_matrix("2 2\n1 2 3").is_err());
    }
}
