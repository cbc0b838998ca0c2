use thermovqa::shotscale::{alpha_sweep, write_alpha_csv, AlphaRow, POWER_LAW_R2_THRESHOLD};

use super::check_beta;
use crate::args::ShotsArgs;
use crate::error::{CliError, CliResult};
use crate::output::write_output;

pub fn shot_rows(args: &ShotsArgs) -> CliResult<Vec<AlphaRow>> {
    for &beta in &args.beta {
        check_beta(beta)?;
    }
    if args.n_min < 2 || args.n_max < args.n_min + 2 {
        return Err(CliError::Usage(format!(
            "need 2 <= n_min and at least three sizes, got {}..={}",
            args.n_min, args.n_max
        )));
    }
    Ok(alpha_sweep(&args.gamma, args.h, &args.beta, args.n_min..=args.n_max, args.k)?)
}

/// One line per `(gamma, beta)` with fits that are not power-law shaped.
pub fn warnings(rows: &[AlphaRow]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let (gamma, beta) = (rows[i].gamma, rows[i].beta);
        let group: Vec<&AlphaRow> = rows[i..].iter().take_while(|r| r.gamma == gamma && r.beta == beta).collect();
        let bad: Vec<&&AlphaRow> = group.iter().filter(|r| !r.fit.is_power_law()).collect();
        if !bad.is_empty() {
            let worst = bad.iter().map(|r| r.fit.r_squared).fold(f64::INFINITY, f64::min);
            out.push(format!(
                "warning: gamma={gamma} beta={beta}: {} of {} fits have r_squared below {POWER_LAW_R2_THRESHOLD} \
                 (lowest {worst:.6}); alpha_i there is not a power-law exponent",
                bad.len(),
                group.len()
            ));
        }
        i += group.len();
    }
    out
}

pub fn shots(args: &ShotsArgs) -> CliResult<()> {
    let rows = shot_rows(args)?;
    for w in warnings(&rows) {
        eprintln!("{w}");
    }
    let mut buf = Vec::new();
    write_alpha_csv(&rows, &mut buf)?;
    write_output(args.output.as_deref(), &buf)
}
