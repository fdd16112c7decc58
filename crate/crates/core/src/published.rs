//! Published survival tables for five displaced Poisson models and a checker
//! that recomputes every cell.

use crate::dist::make_displaced_poisson;
use crate::error::Result;
use crate::finite::survival_finite;
use crate::model::ModelSpec;
use crate::ultimate::{survival_ultimate, SolverOptions};

/// Largest accepted gap between a computed value and a printed 3-decimal cell.
pub const CELL_TOL: f64 = 5e-4;

/// A published table: rows `T` (plus an ultimate row), columns `u`.
#[derive(Debug, Clone, Copy)]
pub struct PublishedTable {
    pub id: u8,
    /// `(λ, shift)` of the displaced Poisson `X`.
    pub x: (f64, usize),
    /// `(λ, shift)` of the displaced Poisson `Y`.
    pub y: (f64, usize),
    pub columns: &'static [usize],
    pub finite: &'static [(usize, &'static [f64])],
    pub ultimate: &'static [f64],
    /// Printed cells are known to disagree with the recursion as stated.
    pub flagged: bool,
}

impl PublishedTable {
    pub fn model(&self, tail_tol: f64) -> Result<ModelSpec> {
        Ok(ModelSpec::new(
            make_displaced_poisson(self.x.0, self.x.1, tail_tol)?,
            make_displaced_poisson(self.y.0, self.y.1, tail_tol)?,
        ))
    }

    pub fn horizons(&self) -> Vec<usize> {
        self.finite.iter().map(|(t, _)| *t).collect()
    }
}

pub const TABLES: [PublishedTable; 5] = [
    PublishedTable {
        id: 1,
        x: (1.0, 0),
        y: (2.0, 0),
        columns: &[0, 1, 2, 3, 4, 5, 10, 15],
        finite: &[
            (1, &[0.736, 0.920, 0.981, 0.996, 0.999, 1.0, 1.0, 1.0]),
            (2, &[0.564, 0.788, 0.909, 0.965, 0.988, 0.996, 1.0, 1.0]),
            (3, &[0.547, 0.771, 0.898, 0.959, 0.985, 0.995, 1.0, 1.0]),
            (4, &[0.505, 0.727, 0.863, 0.936, 0.972, 0.989, 1.0, 1.0]),
            (5, &[0.499, 0.720, 0.857, 0.932, 0.969, 0.987, 1.0, 1.0]),
            (10, &[0.46, 0.673, 0.813, 0.898, 0.946, 0.972, 0.999, 1.0]),
            (20, &[0.446, 0.656, 0.795, 0.882, 0.933, 0.962, 0.998, 1.0]),
            (30, &[0.443, 0.652, 0.791, 0.878, 0.930, 0.960, 0.998, 1.0]),
            (40, &[0.443, 0.651, 0.790, 0.877, 0.929, 0.959, 0.997, 1.0]),
            (50, &[0.442, 0.650, 0.790, 0.876, 0.928, 0.959, 0.997, 1.0]),
        ],
        ultimate: &[0.442, 0.650, 0.790, 0.876, 0.928, 0.958, 0.997, 1.0],
        flagged: false,
    },
    PublishedTable {
        id: 2,
        x: (1.0, 1),
        y: (1.9, 0),
        columns: &[0, 1, 2, 3, 4, 5, 10, 20, 30, 40],
        finite: &[
            (1, &[0.368, 0.736, 0.920, 0.981, 0.996, 0.999, 1.0, 1.0, 1.0, 1.0]),
            (2, &[0.259, 0.581, 0.803, 0.919, 0.970, 0.990, 1.0, 1.0, 1.0, 1.0]),
            (3, &[0.223, 0.518, 0.743, 0.877, 0.947, 0.979, 1.0, 1.0, 1.0, 1.0]),
            (4, &[0.192, 0.458, 0.677, 0.823, 0.910, 0.957, 1.0, 1.0, 1.0, 1.0]),
            (5, &[0.177, 0.428, 0.641, 0.791, 0.886, 0.942, 0.999, 1.0, 1.0, 1.0]),
            (10, &[0.130, 0.324, 0.505, 0.652, 0.765, 0.847, 0.990, 1.0, 1.0, 1.0]),
            (20, &[0.098, 0.248, 0.396, 0.525, 0.634, 0.724, 0.951, 1.0, 1.0, 1.0]),
            (30, &[0.084, 0.214, 0.343, 0.460, 0.562, 0.649, 0.908, 0.998, 1.0, 1.0]),
            (40, &[0.076, 0.193, 0.311, 0.419, 0.515, 0.599, 0.869, 0.994, 1.0, 1.0]),
            (50, &[0.070, 0.179, 0.289, 0.390, 0.481, 0.562, 0.837, 0.989, 1.0, 1.0]),
            (100, &[0.057, 0.144, 0.234, 0.318, 0.395, 0.465, 0.731, 0.952, 0.995, 1.0]),
        ],
        ultimate: &[0.037, 0.094, 0.152, 0.208, 0.259, 0.307, 0.506, 0.748, 0.872, 0.935],
        flagged: false,
    },
    PublishedTable {
        id: 3,
        x: (1.0, 1),
        y: (0.9, 1),
        columns: &[0, 1, 2, 3, 4, 5, 10, 20, 30, 40],
        finite: &[
            (1, &[0.368, 0.736, 0.920, 0.981, 0.996, 0.999, 1.0, 1.0, 1.0, 1.0]),
            (2, &[0.284, 0.629, 0.850, 0.950, 0.986, 0.996, 1.0, 1.0, 1.0, 1.0]),
            (3, &[0.237, 0.552, 0.784, 0.910, 0.967, 0.989, 1.0, 1.0, 1.0, 1.0]),
            (4, &[0.212, 0.506, 0.739, 0.878, 0.949, 0.980, 1.0, 1.0, 1.0, 1.0]),
            (5, &[0.191, 0.466, 0.695, 0.844, 0.927, 0.968, 1.0, 1.0, 1.0, 1.0]),
            (10, &[0.145, 0.366, 0.572, 0.729, 0.837, 0.908, 0.997, 1.0, 1.0, 1.0]),
            (20, &[0.111, 0.286, 0.459, 0.605, 0.720, 0.807, 0.981, 1.0, 1.0, 1.0]),
            (30, &[0.096, 0.249, 0.404, 0.538, 0.650, 0.740, 0.957, 1.0, 1.0, 1.0]),
            (40, &[0.087, 0.227, 0.370, 0.496, 0.604, 0.693, 0.933, 0.999, 1.0, 1.0]),
            (50, &[0.081, 0.212, 0.346, 0.466, 0.570, 0.658, 0.910, 0.998, 1.0, 1.0]),
            (100, &[0.067, 0.175, 0.288, 0.390, 0.482, 0.562, 0.828, 0.984, 0.999, 1.0]),
        ],
        ultimate: &[0.048, 0.127, 0.209, 0.286, 0.355, 0.417, 0.649, 0.873, 0.954, 0.983],
        flagged: false,
    },
    PublishedTable {
        id: 4,
        x: (0.5, 2),
        y: (1.0 / 3.0, 1),
        columns: &[0, 1, 2, 3, 4, 5, 10, 15, 20, 25],
        finite: &[
            (1, &[0.607, 0.910, 0.986, 0.998, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
            (2, &[0.435, 0.797, 0.948, 0.990, 0.998, 1.0, 1.0, 1.0, 1.0, 1.0]),
            (3, &[0.395, 0.758, 0.928, 0.983, 0.997, 0.999, 1.0, 1.0, 1.0, 1.0]),
            (4, &[0.346, 0.700, 0.894, 0.969, 0.992, 0.998, 1.0, 1.0, 1.0, 1.0]),
            (5, &[0.329, 0.678, 0.878, 0.961, 0.989, 0.997, 1.0, 1.0, 1.0, 1.0]),
            (10, &[0.262, 0.573, 0.788, 0.906, 0.962, 0.986, 1.0, 1.0, 1.0, 1.0]),
            (20, &[0.219, 0.494, 0.705, 0.838, 0.916, 0.959, 0.999, 1.0, 1.0, 1.0]),
            (30, &[0.202, 0.459, 0.662, 0.799, 0.884, 0.936, 0.998, 1.0, 1.0, 1.0]),
            (40, &[0.192, 0.439, 0.637, 0.773, 0.862, 0.918, 0.996, 1.0, 1.0, 1.0]),
            (50, &[0.186, 0.426, 0.620, 0.756, 0.846, 0.905, 0.994, 1.0, 1.0, 1.0]),
            (100, &[0.173, 0.398, 0.583, 0.716, 0.808, 0.872, 0.985, 0.999, 1.0, 1.0]),
        ],
        ultimate: &[0.167, 0.383, 0.563, 0.693, 0.784, 0.849, 0.974, 0.996, 0.999, 1.0],
        flagged: true,
    },
    PublishedTable {
        id: 5,
        x: (2.0, 1),
        y: (1.0, 1),
        columns: &[0, 1, 2, 3, 4, 5, 10, 20, 30, 40, 50],
        finite: &[
            (1, &[0.135, 0.406, 0.677, 0.857, 0.947, 0.983, 1.0, 1.0, 1.0, 1.0, 1.0]),
            (2, &[0.100, 0.324, 0.581, 0.782, 0.903, 0.962, 1.0, 1.0, 1.0, 1.0, 1.0]),
            (3, &[0.054, 0.194, 0.391, 0.589, 0.750, 0.862, 0.998, 1.0, 1.0, 1.0, 1.0]),
            (4, &[0.045, 0.166, 0.343, 0.532, 0.696, 0.820, 0.996, 1.0, 1.0, 1.0, 1.0]),
            (5, &[0.029, 0.112, 0.243, 0.401, 0.558, 0.696, 0.982, 1.0, 1.0, 1.0, 1.0]),
            (10, &[0.010, 0.042, 0.099, 0.179, 0.278, 0.388, 0.854, 1.0, 1.0, 1.0, 1.0]),
            (20, &[0.002, 0.008, 0.020, 0.038, 0.065, 0.102, 0.417, 0.946, 0.999, 1.0, 1.0]),
            (30, &[0.0, 0.002, 0.005, 0.010, 0.017, 0.029, 0.161, 0.723, 0.978, 1.0, 1.0]),
            (40, &[0.0, 0.001, 0.001, 0.003, 0.005, 0.008, 0.058, 0.439, 0.874, 0.991, 1.0]),
            (50, &[0.0, 0.0, 0.0, 0.001, 0.002, 0.003, 0.020, 0.228, 0.674, 0.943, 0.996]),
            (100, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.003, 0.035, 0.173, 0.461]),
        ],
        ultimate: &[0.0; 11],
        flagged: false,
    },
];

pub fn table(id: u8) -> Option<&'static PublishedTable> {
    TABLES.iter().find(|t| t.id == id)
}

/// Row of a table: a finite horizon or the ultimate row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Pass,
    /// Mismatch in a table whose printed values are known to be inconsistent.
    Flagged,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCheck {
    pub horizon: Horizon,
    pub u: usize,
    pub printed: f64,
    pub computed: f64,
    pub status: CellStatus,
}

#[derive(Debug, Clone)]
pub struct TableReport {
    pub id: u8,
    pub cells: Vec<CellCheck>,
}

impl TableReport {
    pub fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }

    /// True when no cell failed unexpectedly.
    pub fn ok(&self) -> bool {
        self.count(CellStatus::Fail) == 0
    }

    pub fn row(&self, horizon: Horizon) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(move |c| c.horizon == horizon)
    }
}

/// Recomputes every cell of `t` and compares it with the printed value.
pub fn verify_table(t: &PublishedTable, tail_tol: f64, opts: &SolverOptions) -> Result<TableReport> {
    let m = t.model(tail_tol)?;
    let u_max = *t.columns.iter().max().expect("non-empty columns");
    let t_max = t.finite.iter().map(|(h, _)| *h).max().expect("non-empty rows");
    let grid = survival_finite(&m, u_max, t_max);
    let ult = survival_ultimate(&m, u_max, opts)?.phi;
    let judge = |printed: f64, computed: f64| {
        if (printed - computed).abs() <= CELL_TOL {
            CellStatus::Pass
        } else if t.flagged {
            CellStatus::Flagged
        } else {
            CellStatus::Fail
        }
    };
    let mut cells = Vec::new();
    for (h, row) in t.finite {
        for (&u, &printed) in t.columns.iter().zip(row.iter()) {
            let computed = grid.get(u, *h);
            cells.push(CellCheck {
                horizon: Horizon::Finite(*h),
                u,
                printed,
                computed,
                status: judge(printed, computed),
            });
        }
    }
    for (&u, &printed) in t.columns.iter().zip(t.ultimate.iter()) {
        let computed = ult[u];
        cells.push(CellCheck {
            horizon: Horizon::Infinite,
            u,
            printed,
            computed,
            status: judge(printed, computed),
        });
    }
    Ok(TableReport { id: t.id, cells })
}
