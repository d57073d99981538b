//! Row types and deterministic CSV/JSON rendering.
//!
//! CSV uses '.' decimals, shortest round-trip float formatting, and '\n'
//! line endings. Negative infinity renders as the literal `-inf` in both
//! formats (JSON carries it as a string, since JSON has no infinities).

use serde::{Serialize, Serializer};

use aloha_tf::alpha::AlphaTradeoffPoint;
use aloha_tf::jain::TradeoffPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Extended-real wrapper: `-inf` is a value, not an error.
#[derive(Debug, Clone, Copy)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("inf")
        }
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

/// One Jain tradeoff row. `m` (the user count the fairness is scaled to)
/// is present in multi-curve output and absent in single-point output.
#[derive(Debug, Serialize)]
pub struct JainRow {
    pub theta: f64,
    #[serde(rename = "F_star")]
    pub f_star: f64,
    pub regime: String,
    pub t: usize,
    pub n_prime: usize,
    pub k: usize,
    pub p_s: f64,
    pub p_l: f64,
    pub x_s: f64,
    pub x_l: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

pub const JAIN_HEADER: &str = "theta,F_star,regime,t,n_prime,k,p_s,p_l,x_s,x_l";

impl JainRow {
    pub fn from_point(pt: &TradeoffPoint, m: Option<usize>) -> Self {
        Self {
            theta: pt.theta,
            f_star: pt.f_star,
            regime: pt.regime.to_string(),
            t: pt.t,
            n_prime: pt.control.n_prime(),
            k: pt.control.k(),
            p_s: pt.control.p_s(),
            p_l: pt.control.p_l(),
            x_s: pt.x_s,
            x_l: pt.x_l,
            m,
        }
    }

    pub fn csv(&self) -> String {
        let base = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.theta),
            fmt_f64(self.f_star),
            self.regime,
            self.t,
            self.n_prime,
            self.k,
            fmt_f64(self.p_s),
            fmt_f64(self.p_l),
            fmt_f64(self.x_s),
            fmt_f64(self.x_l),
        );
        match self.m {
            Some(m) => format!("{base},{m}"),
            None => base,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AlphaRow {
    pub theta: f64,
    pub alpha: f64,
    #[serde(rename = "F_star")]
    pub f_star: ExtReal,
    pub regime: String,
    pub p_s: f64,
    pub p_l: f64,
    pub x_s: f64,
    pub x_l: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub flagged: bool,
}

pub const ALPHA_HEADER: &str = "theta,alpha,F_star,regime,p_s,p_l,x_s,x_l";

impl AlphaRow {
    pub fn from_point(pt: &AlphaTradeoffPoint) -> Self {
        Self {
            theta: pt.theta,
            alpha: pt.alpha,
            f_star: ExtReal(pt.f_star),
            regime: pt.regime.to_string(),
            p_s: pt.control.p_s(),
            p_l: pt.control.p_l(),
            x_s: pt.x_s,
            x_l: pt.x_l,
            flagged: pt.flagged,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt_f64(self.theta),
            fmt_f64(self.alpha),
            fmt_f64(self.f_star.0),
            self.regime,
            fmt_f64(self.p_s),
            fmt_f64(self.p_l),
            fmt_f64(self.x_s),
            fmt_f64(self.x_l),
        )
    }
}

pub fn json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
