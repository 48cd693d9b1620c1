//! Fixed-format CSV output.

use super::harness::TailEstimate;
use crate::asymptotics::ApproxForm;

/// 17 significant digits in scientific notation.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn estimates_header(forms: &[ApproxForm]) -> String {
    let mut h = String::from("x,hits,n_reps,p_hat,ci_lo,ci_hi,censored");
    for f in forms {
        h.push_str(&format!(",{f}_approx,{f}_ratio"));
    }
    h
}

/// Header plus one LF-terminated row per estimate.
pub fn write_estimates(rows: &[TailEstimate], forms: &[ApproxForm]) -> String {
    let mut out = estimates_header(forms);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}",
            float(r.x),
            r.hits,
            r.n_reps,
            float(r.p_hat),
            float(r.ci_lo),
            float(r.ci_hi),
            r.censored
        ));
        for f in forms {
            let (v, ratio) = r
                .approx
                .iter()
                .find(|a| a.form == *f)
                .map(|a| (a.value, r.p_hat / a.value))
                .unwrap_or((f64::NAN, f64::NAN));
            out.push_str(&format!(",{},{}", float(v), float(ratio)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(0.0), "0.0000000000000000e0");
        assert_eq!(float(1e-3).parse::<f64>().unwrap(), 1e-3);
        assert_eq!(
            estimates_header(&[ApproxForm::RwTau]),
            "x,hits,n_reps,p_hat,ci_lo,ci_hi,censored,RW_Tau_approx,RW_Tau_ratio"
        );
    }
}
