//! CSV writers for snapshots, diagnostics and trajectories.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsReport;
use crate::error::Result;
use crate::euler::{LineGrid, StickyParticles};
use crate::grid::DistributionState;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// `x,v,f` at every cell center.
pub fn write_snapshot(path: &Path, f: &DistributionState) -> Result<()> {
    let g = &f.grid;
    let mut w = create(path)?;
    writeln!(w, "x,v,f")?;
    for i in 0..g.nx {
        let x = g.x(i);
        for (j, val) in f.row(i).iter().enumerate() {
            writeln!(w, "{},{},{}", x, g.v(j), val)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics(path: &Path, reports: &[DiagnosticsReport]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", DiagnosticsReport::CSV_HEADER)?;
    for r in reports {
        writeln!(w, "{}", r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// `t,x,rho,u`, one block per time.
pub fn write_euler_trajectory(path: &Path, grid: &LineGrid, frames: &[(f64, Vec<f64>, Vec<f64>)]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,x,rho,u")?;
    for (t, rho, u) in frames {
        for i in 0..grid.nx {
            writeln!(w, "{},{},{},{}", t, grid.x(i), rho[i], u[i])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t,x,m,v` for every particle of every snapshot.
pub fn write_particle_dump(path: &Path, snapshots: &[StickyParticles]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,x,m,v")?;
    for s in snapshots {
        for k in 0..s.len() {
            writeln!(w, "{},{},{},{}", s.t, s.x[k], s.m[k], s.v[k])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_picard_trace(path: &Path, d: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "n,d_n")?;
    for (n, v) in d.iter().enumerate() {
        writeln!(w, "{n},{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;

    #[test]
    fn snapshot_has_header_and_one_line_per_cell() {
        let dir = tempfile::tempdir().unwrap();
        let g = PhaseGrid::new(0.0, 1.0, 2.0, 3, 4).unwrap();
        let f = DistributionState::from_fn(g, |x, v| x + v).unwrap();
        let p = dir.path().join("s.csv");
        write_snapshot(&p, &f).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,v,f");
        assert_eq!(lines.len(), 13);
    }

    #[test]
    fn picard_trace_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.csv");
        write_picard_trace(&p, &[0.5, 0.25]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "n,d_n\n0,0.5\n1,0.25\n");
    }
}
