use oppq::numeric::fixed;
use oppq::quantizer::{RootClass, RootReport};
use oppq::Float;
use std::collections::BTreeMap;
use std::fmt::Write;

/// Rows are orders `N`, columns are level labels; columns holding a
/// QES-exact root are starred and spurious roots carry a trailing `~`.
pub fn root_table(report: &RootReport, decimals: usize, oracle: Option<&BTreeMap<usize, Float>>) -> String {
    let mut levels: Vec<usize> = report.orders.iter().flat_map(|o| o.roots.iter().map(|r| r.level)).collect();
    levels.sort_unstable();
    levels.dedup();
    let starred: Vec<bool> = levels
        .iter()
        .map(|l| {
            report
                .orders
                .iter()
                .flat_map(|o| &o.roots)
                .any(|r| r.level == *l && r.class == RootClass::QesExact)
        })
        .collect();

    let mut header = vec!["N".to_string()];
    header.extend(levels.iter().zip(&starred).map(|(l, s)| format!("E{l}{}", if *s { "*" } else { "" })));
    let mut rows = vec![header];
    let mut any_spurious = false;
    for o in &report.orders {
        let mut row = vec![o.n.to_string()];
        for l in &levels {
            row.push(match o.roots.iter().find(|r| r.level == *l) {
                Some(r) if r.class == RootClass::Spurious => {
                    any_spurious = true;
                    format!("{}~", fixed(&r.energy, decimals))
                }
                Some(r) => fixed(&r.energy, decimals),
                None => String::new(),
            });
        }
        rows.push(row);
    }
    if let Some(map) = oracle {
        let mut row = vec!["oracle".to_string()];
        row.extend(levels.iter().map(|l| map.get(l).map(|e| fixed(e, decimals)).unwrap_or_default()));
        rows.push(row);
    }

    let mut out = format!(
        "representation {}, mode {}, {} digits, window [{}, {}]\n",
        report.representation, report.mode, report.digits, report.window.0, report.window.1
    );
    out.push_str(&render(&rows));
    if starred.iter().any(|s| *s) {
        out.push_str("* QES-exact level\n");
    }
    if any_spurious {
        out.push_str("~ spurious root\n");
    }
    out
}

/// Right-aligned columns separated by two spaces, with a rule under the
/// header.
pub fn render(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        let line: Vec<String> = (0..cols)
            .map(|c| format!("{:>w$}", r.get(c).map(String::as_str).unwrap_or(""), w = widths[c]))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
            let _ = writeln!(out, "{}", "-".repeat(total));
        }
    }
    out
}
