//! Trajectory CSVs, tabulated nonlinearities and the plot script.

use std::io::Write;
use std::path::Path;

use resonance_core::nonlinearity::TabulatedF;
use resonance_core::semiflow::Trajectory;

/// Header `t, c_1..c_n, alpha_norm, H_norm_P_part`, one row per saved state.
pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = traj.states.first().map_or(0, |u| u.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("c_{i}")));
    header.push("alpha_norm".into());
    header.push("H_norm_P_part".into());
    w.write_record(&header)?;
    for (i, u) in traj.states.iter().enumerate() {
        let mut row = Vec::with_capacity(n + 3);
        row.push(traj.times[i].to_string());
        row.extend(u.coefficients().iter().map(f64::to_string));
        row.push(traj.alpha_norms[i].to_string());
        row.push(traj.p_h_norms[i].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trajectory(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_trajectory(std::io::BufWriter::new(file), traj).map_err(std::io::Error::other)
}

/// Reads `x, s, f` rows (header required) into a bilinear table.
pub fn read_table(path: &Path) -> Result<TabulatedF, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<(f64, f64, f64)>().enumerate() {
        rows.push(record.map_err(|e| format!("{}: row {}: {e}", path.display(), i + 2))?);
    }
    TabulatedF::from_rows(&rows).map_err(|e| format!("{}: {e}", path.display()))
}

/// Gnuplot script plotting the kernel coordinates and the `H`-norm against time.
pub fn plot_script(csv_files: &[String], n_modes: usize, kernel_modes: &[usize]) -> String {
    let h_norm = (2..n_modes + 2)
        .map(|c| format!("${c}**2"))
        .collect::<Vec<_>>()
        .join("+");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set terminal pngcairo size 1000,800\n");
    s.push_str("set output 'trajectories.png'\n");
    s.push_str("set multiplot layout 2,1\n");
    s.push_str("set xlabel 't'\nset ylabel 'kernel coordinate'\n");
    let kernel: Vec<String> = csv_files
        .iter()
        .flat_map(|f| {
            kernel_modes
                .iter()
                .map(move |&m| format!("'{f}' using 1:{} with lines title '{f} c_{}'", m + 2, m + 1))
        })
        .collect();
    s.push_str(&format!("plot {}\n", kernel.join(", \\\n     ")));
    s.push_str("set ylabel '|u|_H'\nset logscale y\n");
    let norms: Vec<String> = csv_files
        .iter()
        .map(|f| format!("'{f}' using 1:(sqrt({h_norm})) with lines title '{f}'"))
        .collect();
    s.push_str(&format!("plot {}\n", norms.join(", \\\n     ")));
    s.push_str("unset multiplot\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use resonance_core::nonlinearity::builtin::zero;
    use resonance_core::semiflow::{IntegratorConfig, Semiflow};
    use resonance_core::spectral::{build_laplacian_1d, decompose};
    use resonance_core::QuadratureGrid;
    use std::f64::consts::PI;

    #[test]
    fn csv_layout() {
        let es = build_laplacian_1d(3, PI).unwrap();
        let d = decompose(&es, 2).unwrap();
        let grid = QuadratureGrid::default_for(PI, 3).unwrap();
        let f = zero();
        let flow = Semiflow::new(&f, &es, &d, &grid, 4.0).unwrap();
        let cfg = IntegratorConfig {
            step_h: 0.5,
            t_end: 1.0,
            ..Default::default()
        };
        let traj = flow.integrate(&es.mode_state(1), &cfg).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,c_1,c_2,c_3,alpha_norm,H_norm_P_part");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("1,0,1,0,"));
        assert!(lines[3].ends_with(",1"));
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "x,s,f\n0,-1,-1\n0,1,1\n4,-1,-2\n4,1,2\n").unwrap();
        let t = read_table(&path).unwrap();
        assert_eq!(t.value(2.0, 0.5), 0.75);
        std::fs::write(&path, "x,s,f\n0,-1,oops\n").unwrap();
        assert!(read_table(&path).unwrap_err().contains("row 2"));
    }
}
