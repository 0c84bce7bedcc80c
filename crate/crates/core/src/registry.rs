//! Parsing of algorithm spec strings such as `cbfs`, `si:nR:SF:0.25` or
//! `ses:5:0.5`, and construction of fresh instances from them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algorithm::SsrAlgorithm;
use crate::even_shiloach::{EsParams, EsVariant, EvenShiloach};
use crate::graph::VertexId;
use crate::simple_incremental::{SiParams, SimpleIncremental};
use crate::static_search::{CachingSearch, LazySearch, SearchOrder, StaticSearch};

pub const VALID_FORMS: &str = "sbfs | sdfs | cbfs | cdfs | lbfs | ldfs | \
si:<R|nR>:<SF|nSF>:<ratio|inf> | es:<beta|inf>:<ratio|inf> | \
mes:<beta|inf>:<ratio|inf> | ses:<beta|inf>:<ratio|inf>";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown algorithm spec `{spec}`: {reason}; valid forms: {VALID_FORMS}")]
pub struct SpecError {
    pub spec: String,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StaticKind {
    Plain,
    Caching,
    Lazy,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgorithmSpec {
    Static(StaticKind, SearchOrder),
    Si(SiParams),
    Es(EsVariant, EsParams),
}

impl AlgorithmSpec {
    pub fn build(&self, source: VertexId) -> Box<dyn SsrAlgorithm + Send> {
        match *self {
            AlgorithmSpec::Static(StaticKind::Plain, o) => Box::new(StaticSearch::new(source, o)),
            AlgorithmSpec::Static(StaticKind::Caching, o) => Box::new(CachingSearch::new(source, o)),
            AlgorithmSpec::Static(StaticKind::Lazy, o) => Box::new(LazySearch::new(source, o)),
            AlgorithmSpec::Si(p) => Box::new(SimpleIncremental::new(source, p)),
            AlgorithmSpec::Es(variant, p) => Box::new(EvenShiloach::new(variant, source, p)),
        }
    }
}

/// The 13 configurations used for cross-checking: six static-family
/// variants, four SI settings and the three ES variants with beta 5, ratio 0.5.
pub fn canonical_configs() -> Vec<AlgorithmSpec> {
    let mut out = Vec::with_capacity(13);
    for kind in [StaticKind::Plain, StaticKind::Caching, StaticKind::Lazy] {
        for order in [SearchOrder::Bfs, SearchOrder::Dfs] {
            out.push(AlgorithmSpec::Static(kind, order));
        }
    }
    for (forward_search, ratio) in [(true, 0.25), (true, 0.5), (true, 1.0), (false, 0.25)] {
        out.push(AlgorithmSpec::Si(SiParams {
            reverse: false,
            forward_search,
            ratio,
        }));
    }
    let params = EsParams {
        beta: Some(5),
        ratio: Some(0.5),
    };
    for variant in [EsVariant::Classic, EsVariant::MultiLevel, EsVariant::Simplified] {
        out.push(AlgorithmSpec::Es(variant, params));
    }
    out
}

fn parse_limit<T: FromStr>(s: &str) -> Option<Option<T>> {
    if s.eq_ignore_ascii_case("inf") {
        Some(None)
    } else {
        s.parse().ok().map(Some)
    }
}

impl FromStr for AlgorithmSpec {
    type Err = SpecError;

    fn from_str(spec: &str) -> Result<Self, SpecError> {
        let fail = |reason: &str| SpecError {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = spec.trim().split(':').collect();
        match parts.as_slice() {
            [name] => {
                let name = name.to_ascii_lowercase();
                let (kind, order) = name.split_at(name.len().min(1));
                let kind = match kind {
                    "s" => StaticKind::Plain,
                    "c" => StaticKind::Caching,
                    "l" => StaticKind::Lazy,
                    _ => return Err(fail("unrecognised name")),
                };
                let order = match order {
                    "bfs" => SearchOrder::Bfs,
                    "dfs" => SearchOrder::Dfs,
                    _ => return Err(fail("unrecognised name")),
                };
                Ok(AlgorithmSpec::Static(kind, order))
            }
            ["si", reverse, forward, ratio] => {
                let reverse = match *reverse {
                    "R" => true,
                    "nR" => false,
                    _ => return Err(fail("expected R or nR")),
                };
                let forward_search = match *forward {
                    "SF" => true,
                    "nSF" => false,
                    _ => return Err(fail("expected SF or nSF")),
                };
                let ratio = match parse_limit::<f64>(ratio) {
                    Some(Some(r)) if r >= 0.0 && r.is_finite() => r,
                    Some(None) => f64::INFINITY,
                    _ => return Err(fail("ratio must be a non-negative number or inf")),
                };
                Ok(AlgorithmSpec::Si(SiParams {
                    reverse,
                    forward_search,
                    ratio,
                }))
            }
            [family, beta, ratio] => {
                let variant = match *family {
                    "es" => EsVariant::Classic,
                    "mes" => EsVariant::MultiLevel,
                    "ses" => EsVariant::Simplified,
                    _ => return Err(fail("unrecognised family")),
                };
                let beta = parse_limit::<u32>(beta).ok_or_else(|| fail("beta must be an integer or inf"))?;
                let ratio = match parse_limit::<f64>(ratio) {
                    Some(Some(r)) if r >= 0.0 && r.is_finite() => Some(r),
                    Some(None) => None,
                    _ => return Err(fail("ratio must be a non-negative number or inf")),
                };
                Ok(AlgorithmSpec::Es(variant, EsParams { beta, ratio }))
            }
            _ => Err(fail("wrong number of fields")),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Static(kind, order) => {
                let prefix = match kind {
                    StaticKind::Plain => "s",
                    StaticKind::Caching => "c",
                    StaticKind::Lazy => "l",
                };
                write!(f, "{prefix}{}", order.suffix())
            }
            AlgorithmSpec::Si(p) => write!(f, "{p}"),
            AlgorithmSpec::Es(_, _) => f.write_str(&self.build(VertexId(0)).name()),
        }
    }
}
