//! Statistical pass/fail machinery: Kolmogorov-Smirnov tests against a CDF
//! (or between two samples) and five-sigma moment checks, each producing a
//! reproducible [`TestReport`].

use crate::special::kolmogorov_sf;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Outcome of one statistical check. The pass flag is a deterministic
/// function of the statistic and the threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub pass: bool,
    pub sample_size: usize,
    pub seed: u64,
    /// Wall-clock provenance; skipped in JSON so reports are bit-identical
    /// across runs with equal (seed, config).
    #[serde(skip)]
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl TestReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:<42} stat={:<12.6e} thr={:<10.3e}{} n={} seed={} ({} ms)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.statistic,
            self.threshold,
            match self.p_value {
                Some(p) => format!(" p={p:.4}"),
                None => String::new(),
            },
            self.sample_size,
            self.seed,
            self.elapsed_ms,
        )
    }
}

/// One-sample Kolmogorov-Smirnov test against a claimed CDF. Passes when the
/// asymptotic p-value stays at or above `alpha`. Requires 100+ samples.
pub fn ks_test(
    name: &str,
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
    alpha: f64,
    seed: u64,
) -> Result<TestReport> {
    if samples.len() < 100 {
        return Err(Error::precondition(format!(
            "KS test needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut d = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n as f64).abs());
        d = d.max(((i + 1) as f64 / n as f64 - f).abs());
    }
    let p = kolmogorov_sf(d * (n as f64).sqrt());
    Ok(TestReport {
        name: name.into(),
        statistic: d,
        threshold: alpha,
        p_value: Some(p),
        pass: p >= alpha,
        sample_size: n,
        seed,
        elapsed_ms: 0,
        detail: String::new(),
    })
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at the
/// effective size `sqrt(nm/(n+m))`.
pub fn ks_test_two_sample(
    name: &str,
    a: &[f64],
    b: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<TestReport> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::precondition(
            "two-sample KS needs at least 100 samples per side",
        ));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let mut d = 0.0_f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let eff = ((n * m) as f64 / (n + m) as f64).sqrt();
    let p = kolmogorov_sf(d * eff);
    Ok(TestReport {
        name: name.into(),
        statistic: d,
        threshold: alpha,
        p_value: Some(p),
        pass: p >= alpha,
        sample_size: n + m,
        seed,
        elapsed_ms: 0,
        detail: String::new(),
    })
}

/// z-test of the sample mean against a claimed mean, using the sample
/// standard error. Passes iff `|z| <= z_threshold` (5 in the battery) and,
/// when a variance bound is claimed, the sample variance stays below it.
/// Requires 1000+ samples; non-finite variance is an error.
pub fn moment_check(
    name: &str,
    samples: &[f64],
    claimed_mean: f64,
    claimed_variance_bound: Option<f64>,
    z_threshold: f64,
    seed: u64,
) -> Result<TestReport> {
    if samples.len() < 1000 {
        return Err(Error::precondition(format!(
            "moment check needs at least 1000 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / (n - 1.0);
    if !var.is_finite() {
        return Err(Error::precondition("sample variance is not finite"));
    }
    let var_ok = claimed_variance_bound.map_or(true, |b| var <= b);
    if var <= 0.0 {
        // Constant sample: pass only on exact equality of the means.
        let z = if mean == claimed_mean { 0.0 } else { f64::INFINITY };
        return Ok(TestReport {
            name: name.into(),
            statistic: z,
            threshold: z_threshold,
            p_value: None,
            pass: z <= z_threshold && var_ok,
            sample_size: samples.len(),
            seed,
            elapsed_ms: 0,
            detail: "constant sample".into(),
        });
    }
    let z = ((mean - claimed_mean) / (var / n).sqrt()).abs();
    Ok(TestReport {
        name: name.into(),
        statistic: z,
        threshold: z_threshold,
        p_value: None,
        pass: z <= z_threshold && var_ok,
        sample_size: samples.len(),
        seed,
        elapsed_ms: 0,
        detail: format!("mean {mean:.6e} vs claimed {claimed_mean:.6e}, variance {var:.3e}"),
    })
}

/// JSON report document.
pub fn reports_to_json(reports: &[TestReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

/// Minimal JUnit-style XML document (one testsuite, one testcase per
/// report).
pub fn reports_to_junit(reports: &[TestReport]) -> String {
    let failures = reports.iter().filter(|r| !r.pass).count();
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<testsuite name=\"entropic-validation\" tests=\"{}\" failures=\"{failures}\">\n",
        reports.len()
    ));
    for r in reports {
        let time = r.elapsed_ms as f64 / 1000.0;
        if r.pass {
            out.push_str(&format!(
                "  <testcase name=\"{}\" time=\"{time}\"/>\n",
                xml_escape(&r.name)
            ));
        } else {
            out.push_str(&format!(
                "  <testcase name=\"{}\" time=\"{time}\">\n    <failure message=\"{}\"/>\n  </testcase>\n",
                xml_escape(&r.name),
                xml_escape(&format!(
                    "statistic {} vs threshold {}{}",
                    r.statistic,
                    r.threshold,
                    if r.detail.is_empty() {
                        String::new()
                    } else {
                        format!("; {}", r.detail)
                    }
                )),
            ));
        }
    }
    out.push_str("</testsuite>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
