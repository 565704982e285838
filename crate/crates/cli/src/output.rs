use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use warpforce::verify::{write_summary_csv, BoundReport};
use warpforce::Error;

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_with<F>(path: &Path, f: F) -> Result<(), Error>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), Error>,
{
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), Error> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

/// `reports.json` and `summary.csv` in `dir`.
pub fn write_reports(dir: &Path, reports: &[BoundReport]) -> Result<(), Error> {
    write_json(&dir.join("reports.json"), reports)?;
    write_with(&dir.join("summary.csv"), |w| write_summary_csv(reports, w))
}

pub fn print_json<T: Serialize + ?Sized>(value: &T) -> Result<(), Error> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn status(r: &BoundReport) -> &'static str {
    match (r.error.is_some(), r.pass, r.marginal) {
        (true, _, _) => "ERROR",
        (false, true, false) => "pass",
        (false, true, true) => "pass~",
        (false, false, true) => "FAIL~",
        (false, false, false) => "FAIL",
    }
}

/// One line per report, then totals. `~` marks results within the grid
/// error band.
pub fn print_reports(reports: &[BoundReport], json: bool) -> Result<(), Error> {
    if json {
        return print_json(reports);
    }
    let mut out = std::io::stdout().lock();
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(out, "{:<6} {:<14} {:<40}", status(r), r.name, params.join(" "))?;
        match &r.error {
            Some(e) => writeln!(out, " {e}")?,
            None => writeln!(out, " lhs={:.6e} rhs={:.6e} margin={:.3e}", r.lhs, r.rhs, r.margin)?,
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let marginal = reports.iter().filter(|r| r.marginal).count();
    writeln!(
        out,
        "{passed}/{} passed, {marginal} marginal, {} hard failures",
        reports.len(),
        reports.iter().filter(|r| r.is_hard_failure()).count()
    )?;
    Ok(())
}
