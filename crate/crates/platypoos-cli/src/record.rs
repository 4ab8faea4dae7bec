//! Run records and their serialized forms.
//!
//! Numbers are rendered with 12 significant digits. Sweep CSV carries a
//! fixed column set; `run`/`rollout` outputs reuse it minus the wall clock
//! (so identical configs and seeds produce byte-identical records) plus the
//! recommendation fields.

use platypoos::seq::Action;

/// Column set and order of sweep CSV rows.
pub const SWEEP_COLUMNS: [&str; 15] = [
    "planner",
    "env",
    "seed",
    "n",
    "gamma",
    "noise_kind",
    "b",
    "btilde",
    "rmaxtilde",
    "regret",
    "shifted_return",
    "budget_used",
    "max_depth",
    "wallclock_ms",
    "error",
];

/// Extra trailing columns in `run`/`rollout` records.
pub const RUN_EXTRA_COLUMNS: [&str; 2] = ["recommended_action", "actions"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub planner: String,
    pub env: String,
    pub seed: u64,
    pub n: u64,
    pub gamma: f64,
    pub noise_kind: String,
    pub b: f64,
    pub btilde: Option<f64>,
    pub rmaxtilde: Option<f64>,
    pub regret: Option<f64>,
    pub shifted_return: Option<f64>,
    pub budget_used: Option<u64>,
    pub max_depth: Option<u32>,
    pub wallclock_ms: u64,
    pub error: Option<String>,
    pub recommended_action: Option<Action>,
    pub actions: Vec<Action>,
}

/// Render with 12 significant digits, plain decimal where reasonable,
/// exponent notation outside `1e-4 ..= 1e12`, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exp) = formatted.split_once('e').expect("e-notation");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };
    if (-4..12).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else {
        if digits.len() == 1 {
            format!("{sign}{digits}e{exp}")
        } else {
            format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..])
        }
    }
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn actions_field(actions: &[Action]) -> String {
    actions.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
}

impl RunRecord {
    fn base_fields(&self, with_wallclock: bool) -> Vec<String> {
        let mut f = vec![
            self.planner.clone(),
            self.env.clone(),
            self.seed.to_string(),
            self.n.to_string(),
            fmt_sig(self.gamma),
            self.noise_kind.clone(),
            fmt_sig(self.b),
            opt_f64(self.btilde),
            opt_f64(self.rmaxtilde),
            opt_f64(self.regret),
            opt_f64(self.shifted_return),
            self.budget_used.map(|v| v.to_string()).unwrap_or_default(),
            self.max_depth.map(|v| v.to_string()).unwrap_or_default(),
        ];
        if with_wallclock {
            f.push(self.wallclock_ms.to_string());
        }
        f.push(self.error.clone().unwrap_or_default());
        f
    }

    /// Row under [`SWEEP_COLUMNS`].
    pub fn sweep_csv_row(&self) -> String {
        self.base_fields(true).join(",")
    }

    pub fn sweep_csv_header() -> String {
        SWEEP_COLUMNS.join(",")
    }

    /// Header and row for `run`/`rollout`: sweep columns without the wall
    /// clock, plus the recommendation fields.
    pub fn run_csv_header() -> String {
        let mut cols: Vec<&str> =
            SWEEP_COLUMNS.iter().copied().filter(|c| *c != "wallclock_ms").collect();
        cols.extend(RUN_EXTRA_COLUMNS);
        cols.join(",")
    }

    pub fn run_csv_row(&self) -> String {
        let mut f = self.base_fields(false);
        f.push(self.recommended_action.map(|a| a.to_string()).unwrap_or_default());
        f.push(actions_field(&self.actions));
        f.join(",")
    }

    fn json_fields(&self, with_wallclock: bool, with_recommendation: bool) -> String {
        fn str_field(name: &str, v: &str) -> String {
            format!("\"{name}\":\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""))
        }
        fn num_field(name: &str, v: &str) -> String {
            format!("\"{name}\":{}", if v.is_empty() { "null" } else { v })
        }
        let mut parts = vec![
            str_field("planner", &self.planner),
            str_field("env", &self.env),
            num_field("seed", &self.seed.to_string()),
            num_field("n", &self.n.to_string()),
            num_field("gamma", &fmt_sig(self.gamma)),
            str_field("noise_kind", &self.noise_kind),
            num_field("b", &fmt_sig(self.b)),
            num_field("btilde", &opt_f64(self.btilde)),
            num_field("rmaxtilde", &opt_f64(self.rmaxtilde)),
            num_field("regret", &opt_f64(self.regret)),
            num_field("shifted_return", &opt_f64(self.shifted_return)),
            num_field("budget_used", &self.budget_used.map(|v| v.to_string()).unwrap_or_default()),
            num_field("max_depth", &self.max_depth.map(|v| v.to_string()).unwrap_or_default()),
        ];
        if with_wallclock {
            parts.push(num_field("wallclock_ms", &self.wallclock_ms.to_string()));
        }
        match &self.error {
            Some(e) => parts.push(str_field("error", e)),
            None => parts.push("\"error\":null".into()),
        }
        if with_recommendation {
            parts.push(num_field(
                "recommended_action",
                &self.recommended_action.map(|a| a.to_string()).unwrap_or_default(),
            ));
            parts.push(format!(
                "\"actions\":[{}]",
                self.actions.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
            ));
        }
        format!("{{{}}}", parts.join(","))
    }

    pub fn run_json(&self) -> String {
        self.json_fields(false, true)
    }

    pub fn sweep_json(&self) -> String {
        self.json_fields(true, false)
    }
}
