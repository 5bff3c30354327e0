//! Deformed-sphere Wavefront OBJ: the vertex at `(theta_i, phi_j)` sits at
//! radius `field(i, j)` along the unit normal. Vertices are numbered north
//! pole, rings by increasing `theta`, south pole; pole radii are the mean of
//! the adjacent ring.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::FieldSample;
use crate::error::{Error, Result};

pub fn write_deformed_mesh<W: Write>(field: &FieldSample, mut w: W) -> Result<()> {
    let grid = &field.grid;
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    if let Some(k) = field.values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveRadius {
            i: k / np,
            j: k % np,
            value: field.values[k],
        });
    }
    let ring_mean = |i: usize| field.values[i * np..(i + 1) * np].iter().sum::<f64>() / np as f64;
    let mut out = String::with_capacity(64 * (nt * np + 2));
    let mut vertex = |p: [f64; 3], r: f64| {
        out.push_str(&format!("v {} {} {}\n", r * p[0], r * p[1], r * p[2]));
    };
    vertex([0.0, 0.0, 1.0], ring_mean(0));
    for i in 0..nt {
        for j in 0..np {
            vertex(grid.point(i, j), field.at(i, j));
        }
    }
    vertex([0.0, 0.0, -1.0], ring_mean(nt - 1));

    // 1-based OBJ indices
    let v = |i: usize, j: usize| 2 + i * np + (j % np);
    let north = 1;
    let south = nt * np + 2;
    for j in 0..np {
        out.push_str(&format!("f {} {} {}\n", north, v(0, j), v(0, j + 1)));
    }
    for i in 0..nt - 1 {
        for j in 0..np {
            out.push_str(&format!(
                "f {} {} {} {}\n",
                v(i, j),
                v(i + 1, j),
                v(i + 1, j + 1),
                v(i, j + 1)
            ));
        }
    }
    for j in 0..np {
        out.push_str(&format!("f {} {} {}\n", south, v(nt - 1, j + 1), v(nt - 1, j)));
    }
    w.write_all(out.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io("<mesh>", e))
}

/// Writes the mesh to `path`; nothing is created if the field is rejected.
pub fn export_deformed_mesh(field: &FieldSample, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_deformed_mesh(field, &mut buf)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&buf)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
