use std::collections::BTreeMap;
use std::fmt::Write;

use super::metrics::METRIC_CONVENTIONS;
use crate::tensor_io::CaseMetrics;

/// Text feedback: per-case metrics or failure diagnostics, then the success
/// rate of every (modality, pattern, af) cell.
pub fn feedback_report(records: &[CaseMetrics]) -> String {
    let mut out = String::new();
    if records.is_empty() {
        out.push_str("no cases evaluated\n");
        return out;
    }
    let _ = writeln!(out, "# {METRIC_CONVENTIONS}");
    let mut cells: BTreeMap<_, (usize, usize)> = BTreeMap::new();
    for r in records {
        let label = format!("{} {} {} {} af{}", r.team, r.case_id, r.modality, r.pattern, r.af);
        match (r.valid, r.ssim, r.psnr_db, r.nmse) {
            (true, Some(s), Some(p), Some(n)) => {
                let _ = writeln!(out, "case {label}: SSIM {s:.4} PSNR {p:.2} dB NMSE {n:.5}");
            }
            _ => {
                let reason = r.failure_reason.map_or("unknown", |f| f.as_str());
                let _ = writeln!(out, "case {label}: FAILED {reason}");
            }
        }
        let cell = cells
            .entry((r.team.clone(), r.modality, r.pattern, r.af))
            .or_insert((0, 0));
        cell.1 += 1;
        if r.valid {
            cell.0 += 1;
        }
    }
    for ((team, modality, pattern, af), (ok, total)) in cells {
        let _ = writeln!(
            out,
            "success rate {team} {modality} {pattern} af{af}: {:.2} ({ok}/{total})",
            ok as f64 / total as f64
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::Modality;
    use crate::sampling::Pattern;
    use crate::tensor_io::FailureReason;

    fn ok(i: usize) -> CaseMetrics {
        CaseMetrics {
            team: "t".into(),
            case_id: format!("P{i:03}"),
            modality: Modality::CineLax,
            pattern: Pattern::Radial,
            af: 8,
            ssim: Some(0.9),
            psnr_db: Some(35.0),
            nmse: Some(0.01),
            valid: true,
            failure_reason: None,
        }
    }

    #[test]
    fn empty_report() {
        assert_eq!(feedback_report(&[]), "no cases evaluated\n");
    }

    #[test]
    fn all_valid_rate_is_one() {
        let r = feedback_report(&[ok(0), ok(1)]);
        assert!(r.contains("success rate t cine_lax radial af8: 1.00 (2/2)"));
    }

    #[test]
    fn missing_file_is_diagnosed() {
        let mut recs: Vec<_> = (0..9).map(ok).collect();
        recs.push(CaseMetrics::failed("t", "P009", Modality::CineLax, Pattern::Radial, 8, FailureReason::MissingFile));
        let r = feedback_report(&recs);
        assert!(r.contains("success rate t cine_lax radial af8: 0.90 (9/10)"));
        assert!(r.contains("case t P009 cine_lax radial af8: FAILED missing_file"));
    }
}
