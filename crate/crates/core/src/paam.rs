//! Phased array antenna module (PAAM) and grid-of-beams (GoB) synthesis.
//!
//! The panel is an 8x12 lattice of dual-polarized element positions facing
//! boresight (+y), columns along x spaced `dh` wavelengths, rows along z
//! spaced `dv` wavelengths. Beams are formed with ideal progressive phase
//! weights; the array factor of a uniform lattice separates into the product
//! of two Dirichlet kernels, which is what [`beam_gain`] evaluates. Wide
//! beams use a smaller subarray aperture so that their footprints genuinely
//! cover a 20 x 20 degree cell.

use crate::error::{Error, Result};
use crate::num::Real;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Single-element gain pattern constants.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ElementPattern<R> {
    pub max_gain_dbi: R,
    pub az_3db_deg: R,
    pub el_3db_deg: R,
    pub front_back_ratio_db: R,
    pub sla_v_db: R,
}

impl<R: Real> Default for ElementPattern<R> {
    fn default() -> Self {
        Self {
            max_gain_dbi: R::of(8.0),
            az_3db_deg: R::of(65.0),
            el_3db_deg: R::of(65.0),
            front_back_ratio_db: R::of(30.0),
            sla_v_db: R::of(30.0),
        }
    }
}

impl<R: Real> ElementPattern<R> {
    pub fn validate(&self) -> Result<()> {
        if self.az_3db_deg <= R::zero() || self.el_3db_deg <= R::zero() {
            return Err(Error::config("element beamwidths must be positive"));
        }
        if self.front_back_ratio_db <= R::zero() || self.sla_v_db <= R::zero() {
            return Err(Error::config("element attenuation caps must be positive"));
        }
        Ok(())
    }
}

/// Panel geometry and RF configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrayConfig<R> {
    /// Element rows (vertical).
    pub rows: usize,
    /// Element columns (horizontal).
    pub cols: usize,
    /// Horizontal spacing in wavelengths.
    pub dh: R,
    /// Vertical spacing in wavelengths.
    pub dv: R,
    pub carrier_freq_hz: R,
    pub bandwidth_hz: R,
    /// Each position carries a cross-polarized element pair.
    pub dual_polarized: bool,
    /// Subarray aperture used to form wide beams (rows, cols).
    pub wb_subarray_rows: usize,
    pub wb_subarray_cols: usize,
    pub element: ElementPattern<R>,
}

impl<R: Real> Default for ArrayConfig<R> {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 12,
            dh: R::of(0.5),
            dv: R::of(0.7),
            carrier_freq_hz: R::of(28e9),
            bandwidth_hz: R::of(100e6),
            dual_polarized: true,
            wb_subarray_rows: 4,
            wb_subarray_cols: 5,
            element: ElementPattern::default(),
        }
    }
}

impl<R: Real> ArrayConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 1 || self.cols < 1 {
            return Err(Error::config("array must have at least 1 row and 1 column"));
        }
        if self.dh <= R::zero() || self.dv <= R::zero() {
            return Err(Error::config("element spacings must be positive"));
        }
        if self.carrier_freq_hz <= R::zero() || self.bandwidth_hz <= R::zero() {
            return Err(Error::config("carrier frequency and bandwidth must be positive"));
        }
        if self.wb_subarray_rows < 1 || self.wb_subarray_cols < 1 {
            return Err(Error::config("wide-beam subarray must have at least 1x1 elements"));
        }
        self.element.validate()
    }

    /// Total radiating elements (192 for the default dual-polarized 8x12 panel).
    pub fn element_count(&self) -> usize {
        self.rows * self.cols * if self.dual_polarized { 2 } else { 1 }
    }

    /// Aperture used by a beam of the given kind, clamped to the panel.
    pub fn aperture(&self, kind: BeamKind) -> (usize, usize) {
        match kind {
            BeamKind::Narrow => (self.rows, self.cols),
            BeamKind::Wide => {
                (self.wb_subarray_rows.min(self.rows), self.wb_subarray_cols.min(self.cols))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BeamKind {
    Wide,
    Narrow,
}

/// One entry of the grid-of-beams codebook.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Beam<R> {
    pub id: u32,
    pub kind: BeamKind,
    pub az_steer_deg: R,
    pub el_steer_deg: R,
    /// Parent wide beam; present iff `kind == Narrow`.
    pub parent_wb: Option<u32>,
}

/// Angular cell `[az_lo, az_hi] x [el_lo, el_hi]` in degrees.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AngularCell<R> {
    pub az_lo: R,
    pub az_hi: R,
    pub el_lo: R,
    pub el_hi: R,
}

impl<R: Real> AngularCell<R> {
    pub fn center(&self) -> (R, R) {
        let half = R::of(0.5);
        ((self.az_lo + self.az_hi) * half, (self.el_lo + self.el_hi) * half)
    }

    pub fn contains(&self, az: R, el: R) -> bool {
        let eps = R::of(1e-9);
        az >= self.az_lo - eps && az <= self.az_hi + eps && el >= self.el_lo - eps && el <= self.el_hi + eps
    }
}

/// GoB layout: how the sector field of view is partitioned into wide-beam
/// cells and how many narrow beams tile each cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GobLayout<R> {
    pub az_min_deg: R,
    pub az_max_deg: R,
    pub el_min_deg: R,
    pub el_max_deg: R,
    pub wb_az_count: usize,
    pub wb_el_count: usize,
    /// Narrow beams per wide beam, row-major in elevation then azimuth.
    pub nb_per_wb: Vec<usize>,
    /// Expected narrow-beam total; synthesis rejects a mismatching table.
    pub nb_total: usize,
}

impl<R: Real> Default for GobLayout<R> {
    fn default() -> Self {
        // 12 WBs in a 6x2 grid; the lower elevation row carries 12 NBs per
        // WB, the upper row 10-11, totaling 136.
        let mut nb_per_wb = vec![12usize; 6];
        nb_per_wb.extend_from_slice(&[11, 11, 11, 11, 10, 10]);
        Self {
            az_min_deg: R::of(-60.0),
            az_max_deg: R::of(60.0),
            el_min_deg: R::of(-40.0),
            el_max_deg: R::of(0.0),
            wb_az_count: 6,
            wb_el_count: 2,
            nb_per_wb,
            nb_total: 136,
        }
    }
}

impl<R: Real> GobLayout<R> {
    pub fn wb_count(&self) -> usize {
        self.wb_az_count * self.wb_el_count
    }

    /// Footprint cell of a wide beam, by wide-beam index (row-major in
    /// elevation then azimuth).
    pub fn wb_cell(&self, wb_index: usize) -> AngularCell<R> {
        let az_span = (self.az_max_deg - self.az_min_deg) / R::of_usize(self.wb_az_count);
        let el_span = (self.el_max_deg - self.el_min_deg) / R::of_usize(self.wb_el_count);
        let el_idx = wb_index / self.wb_az_count;
        let az_idx = wb_index % self.wb_az_count;
        AngularCell {
            az_lo: self.az_min_deg + az_span * R::of_usize(az_idx),
            az_hi: self.az_min_deg + az_span * R::of_usize(az_idx + 1),
            el_lo: self.el_min_deg + el_span * R::of_usize(el_idx),
            el_hi: self.el_min_deg + el_span * R::of_usize(el_idx + 1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.az_max_deg <= self.az_min_deg || self.el_max_deg <= self.el_min_deg {
            return Err(Error::Layout("empty field of view".into()));
        }
        if self.wb_az_count < 1 || self.wb_el_count < 1 {
            return Err(Error::Layout("wide-beam grid must be at least 1x1".into()));
        }
        if self.nb_per_wb.len() != self.wb_count() {
            return Err(Error::Layout(format!(
                "nb_per_wb has {} entries for {} wide beams",
                self.nb_per_wb.len(),
                self.wb_count()
            )));
        }
        if self.nb_per_wb.iter().any(|&c| c == 0) {
            return Err(Error::Layout("every wide beam needs at least one narrow beam".into()));
        }
        let total: usize = self.nb_per_wb.iter().sum();
        if total != self.nb_total {
            return Err(Error::Layout(format!(
                "nb_per_wb sums to {total}, layout expects {}",
                self.nb_total
            )));
        }
        Ok(())
    }
}

/// The synthesized beam codebook.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridOfBeams<R> {
    pub wide_beams: Vec<Beam<R>>,
    pub narrow_beams: Vec<Beam<R>>,
    pub nb_to_wb: BTreeMap<u32, u32>,
    pub wb_az_count: usize,
    pub wb_el_count: usize,
    /// Footprint cells indexed like `wide_beams`.
    pub wb_cells: Vec<AngularCell<R>>,
}

impl<R: Real> GridOfBeams<R> {
    pub fn beam(&self, id: u32) -> Option<&Beam<R>> {
        let nw = self.wide_beams.len() as u32;
        if id < nw {
            self.wide_beams.get(id as usize)
        } else {
            self.narrow_beams.get((id - nw) as usize)
        }
    }

    /// Narrow beams whose parent is the given wide beam, in id order.
    pub fn children_of(&self, wb_id: u32) -> Vec<&Beam<R>> {
        self.narrow_beams.iter().filter(|b| b.parent_wb == Some(wb_id)).collect()
    }

    /// (elevation row, azimuth column) of a wide beam in the WB grid.
    pub fn wb_grid_pos(&self, wb_id: u32) -> (usize, usize) {
        let i = wb_id as usize;
        (i / self.wb_az_count, i % self.wb_az_count)
    }

    /// CSV export: `beam_id,kind,az_steer_deg,el_steer_deg,parent_wb`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beam_id,kind,az_steer_deg,el_steer_deg,parent_wb\n");
        for b in self.wide_beams.iter().chain(self.narrow_beams.iter()) {
            let kind = match b.kind {
                BeamKind::Wide => "wide",
                BeamKind::Narrow => "narrow",
            };
            let parent = b.parent_wb.map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{}",
                b.id,
                kind,
                b.az_steer_deg.as_f64(),
                b.el_steer_deg.as_f64(),
                parent
            );
        }
        out
    }
}

/// Single-element gain (dBi) toward a direction in the panel frame.
pub fn element_gain<R: Real>(pattern: &ElementPattern<R>, az_deg: R, el_deg: R) -> R {
    let twelve = R::of(12.0);
    let a_h = (twelve * (az_deg / pattern.az_3db_deg).powi(2)).min(pattern.front_back_ratio_db);
    let a_v = (twelve * (el_deg / pattern.el_3db_deg).powi(2)).min(pattern.sla_v_db);
    let att = (a_h + a_v).min(pattern.front_back_ratio_db);
    pattern.max_gain_dbi - att
}

/// Dirichlet kernel |sin(n a / 2) / sin(a / 2)|, with its limit value `n`
/// at the zeros of the denominator.
fn dirichlet<R: Real>(n: usize, alpha: R) -> R {
    let half = alpha * R::of(0.5);
    let s = half.sin();
    if s.abs() < R::of(1e-9) {
        R::of_usize(n)
    } else {
        ((R::of_usize(n) * half).sin() / s).abs()
    }
}

/// Beam gain (dBi): element gain plus the planar-array factor of the beam's
/// aperture steered at the beam's direction. The array-factor term is
/// normalized to contribute `10 log10(aperture size)` at the steering
/// direction and is floored 80 dB below that peak so the result is finite
/// at pattern nulls.
pub fn beam_gain<R: Real>(config: &ArrayConfig<R>, beam: &Beam<R>, az_deg: R, el_deg: R) -> R {
    let (n_rows, n_cols) = config.aperture(beam.kind);

    // Direction cosines along the column (x) and row (z) axes.
    let u = az_deg.to_radians().sin() * el_deg.to_radians().cos();
    let v = el_deg.to_radians().sin();
    let u0 = beam.az_steer_deg.to_radians().sin() * beam.el_steer_deg.to_radians().cos();
    let v0 = beam.el_steer_deg.to_radians().sin();

    let two_pi = R::of(std::f64::consts::TAU);
    let alpha = two_pi * config.dh * (u - u0);
    let beta = two_pi * config.dv * (v - v0);

    let coherent = dirichlet(n_cols, alpha) * dirichlet(n_rows, beta);
    let n_total = R::of_usize(n_rows * n_cols);
    let power_ratio = (coherent * coherent / n_total).max(n_total * R::of(1e-8));

    element_gain(&config.element, az_deg, el_deg) + R::of(10.0) * power_ratio.log10()
}

/// Synthesize the grid of beams. Wide beams are numbered 0.. row-major in
/// elevation then azimuth; narrow beams continue the numbering, tiling each
/// parent cell with a near-square sub-grid filled row-major in elevation
/// then azimuth. The result is deterministic for a given config + layout.
pub fn synthesize_gob<R: Real>(
    config: &ArrayConfig<R>,
    layout: &GobLayout<R>,
) -> Result<GridOfBeams<R>> {
    config.validate()?;
    layout.validate()?;

    let wb_count = layout.wb_count();
    let mut wide_beams = Vec::with_capacity(wb_count);
    let mut wb_cells = Vec::with_capacity(wb_count);
    for i in 0..wb_count {
        let cell = layout.wb_cell(i);
        let (az, el) = cell.center();
        wide_beams.push(Beam {
            id: i as u32,
            kind: BeamKind::Wide,
            az_steer_deg: az,
            el_steer_deg: el,
            parent_wb: None,
        });
        wb_cells.push(cell);
    }

    let mut narrow_beams = Vec::with_capacity(layout.nb_total);
    let mut nb_to_wb = BTreeMap::new();
    let mut next_id = wb_count as u32;
    for (wb_index, &count) in layout.nb_per_wb.iter().enumerate() {
        let cell = &wb_cells[wb_index];
        let az_span = cell.az_hi - cell.az_lo;
        let el_span = cell.el_hi - cell.el_lo;

        // Near-square sub-grid: pick the elevation row count so cells come
        // out roughly isotropic, then fill rows bottom-up, west-east.
        let ratio = (count as f64 * el_span.as_f64() / az_span.as_f64()).sqrt();
        let n_el = (ratio.round() as usize).clamp(1, count);
        let n_az = count.div_ceil(n_el);

        let az_step = az_span / R::of_usize(n_az);
        let el_step = el_span / R::of_usize(n_el);
        let half = R::of(0.5);
        let mut placed = 0;
        'fill: for ej in 0..n_el {
            for ai in 0..n_az {
                if placed == count {
                    break 'fill;
                }
                let az = cell.az_lo + az_step * (R::of_usize(ai) + half);
                let el = cell.el_lo + el_step * (R::of_usize(ej) + half);
                if !cell.contains(az, el) {
                    return Err(Error::Layout(format!(
                        "narrow beam at ({az}, {el}) escapes its parent cell"
                    )));
                }
                narrow_beams.push(Beam {
                    id: next_id,
                    kind: BeamKind::Narrow,
                    az_steer_deg: az,
                    el_steer_deg: el,
                    parent_wb: Some(wb_index as u32),
                });
                nb_to_wb.insert(next_id, wb_index as u32);
                next_id += 1;
                placed += 1;
            }
        }
    }

    Ok(GridOfBeams {
        wide_beams,
        narrow_beams,
        nb_to_wb,
        wb_az_count: layout.wb_az_count,
        wb_el_count: layout.wb_el_count,
        wb_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> (ArrayConfig<f64>, GobLayout<f64>) {
        (ArrayConfig::default(), GobLayout::default())
    }

    #[test]
    fn element_gain_boresight() {
        let p = ElementPattern::<f64>::default();
        assert_eq!(element_gain(&p, 0.0, 0.0), 8.0);
    }

    #[test]
    fn element_gain_at_3db_azimuth() {
        // 12 * (65/65)^2 = 12 dB of attenuation.
        let p = ElementPattern::<f64>::default();
        assert!((element_gain(&p, 65.0, 0.0) - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn element_gain_clipped_behind() {
        let p = ElementPattern::<f64>::default();
        assert!((element_gain(&p, 180.0, 0.0) - (-22.0)).abs() < 1e-12);
    }

    #[test]
    fn element_gain_even_and_bounded() {
        let p = ElementPattern::<f64>::default();
        for az in (-180..=180).step_by(7) {
            for el in (-90..=90).step_by(7) {
                let g = element_gain(&p, az as f64, el as f64);
                assert!((g - element_gain(&p, -az as f64, el as f64)).abs() < 1e-12);
                assert!((g - element_gain(&p, az as f64, -el as f64)).abs() < 1e-12);
                assert!(g <= 8.0 + 1e-12);
                assert!(g >= 8.0 - 30.0 - 1e-12);
            }
        }
        // Max over a 1-degree scan sits at boresight.
        let mut best = f64::NEG_INFINITY;
        let mut arg = (0i32, 0i32);
        for az in -180..=180 {
            for el in -90..=90 {
                let g = element_gain(&p, az as f64, el as f64);
                if g > best {
                    best = g;
                    arg = (az, el);
                }
            }
        }
        assert_eq!(arg, (0, 0));
    }

    /// Oracle: direct coherent summation of the aperture's unit phasors.
    fn af_power_db_oracle(cfg: &ArrayConfig<f64>, beam: &Beam<f64>, az: f64, el: f64) -> f64 {
        let (rows, cols) = cfg.aperture(beam.kind);
        let u = az.to_radians().sin() * el.to_radians().cos();
        let v = el.to_radians().sin();
        let u0 = beam.az_steer_deg.to_radians().sin() * beam.el_steer_deg.to_radians().cos();
        let v0 = beam.el_steer_deg.to_radians().sin();
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for m in 0..cols {
            for n in 0..rows {
                let phase = std::f64::consts::TAU
                    * (cfg.dh * m as f64 * (u - u0) + cfg.dv * n as f64 * (v - v0));
                re += phase.cos();
                im += phase.sin();
            }
        }
        let total = (rows * cols) as f64;
        10.0 * ((re * re + im * im) / total).max(total * 1e-8).log10()
    }

    #[test]
    fn beam_gain_at_steering_is_element_plus_aperture() {
        let (cfg, _) = defaults();
        let beam = Beam { id: 0, kind: BeamKind::Narrow, az_steer_deg: 0.0, el_steer_deg: 0.0, parent_wb: None };
        let g = beam_gain(&cfg, &beam, 0.0, 0.0);
        let expect = 8.0 + 10.0 * 96.0f64.log10();
        assert!((g - expect).abs() < 1e-9, "got {g}, expected {expect}");
        assert!((g - 27.82).abs() < 0.01);
    }

    #[test]
    fn beam_gain_matches_phasor_sum_oracle() {
        let (cfg, layout) = defaults();
        let gob = synthesize_gob(&cfg, &layout).unwrap();
        let dirs = [(-55.0, -35.0), (-20.0, -10.0), (0.0, -30.0), (12.5, -4.0), (47.0, -22.0)];
        for beam in gob.wide_beams.iter().chain(gob.narrow_beams.iter()).step_by(9) {
            for &(az, el) in &dirs {
                let got = beam_gain(&cfg, beam, az, el);
                let want = element_gain(&cfg.element, az, el) + af_power_db_oracle(&cfg, beam, az, el);
                assert!(
                    (got - want).abs() < 1e-6,
                    "beam {} dir ({az},{el}): {got} vs {want}",
                    beam.id
                );
            }
        }
    }

    #[test]
    fn beam_gain_single_element_equals_element_gain() {
        let cfg = ArrayConfig::<f64> { rows: 1, cols: 1, ..ArrayConfig::default() };
        let beam = Beam { id: 0, kind: BeamKind::Narrow, az_steer_deg: 10.0, el_steer_deg: -5.0, parent_wb: None };
        for &(az, el) in &[(0.0, 0.0), (30.0, -20.0), (-65.0, 10.0)] {
            let g = beam_gain(&cfg, &beam, az, el);
            assert!((g - element_gain(&cfg.element, az, el)).abs() < 1e-12);
        }
    }

    #[test]
    fn beam_gain_max_at_steering_direction() {
        let (cfg, layout) = defaults();
        let gob = synthesize_gob(&cfg, &layout).unwrap();
        for beam in gob.wide_beams.iter().chain(gob.narrow_beams.iter()) {
            let peak = beam_gain(&cfg, beam, beam.az_steer_deg, beam.el_steer_deg);
            for az in -60..=60 {
                for el in -40..=0 {
                    let g = beam_gain(&cfg, beam, az as f64, el as f64);
                    assert!(
                        g <= peak + 1e-9,
                        "beam {} beats its steering gain at ({az},{el})",
                        beam.id
                    );
                }
            }
        }
    }

    #[test]
    fn default_gob_counts() {
        let (cfg, layout) = defaults();
        let gob = synthesize_gob(&cfg, &layout).unwrap();
        assert_eq!(gob.wide_beams.len(), 12);
        assert_eq!(gob.narrow_beams.len(), 136);
        assert_eq!(gob.nb_to_wb.len(), 136);
        assert_eq!(cfg.element_count(), 192);
        // Every wide beam has at least one child.
        for wb in &gob.wide_beams {
            assert!(!gob.children_of(wb.id).is_empty());
        }
        // Unique, stable ids.
        let mut ids: Vec<u32> =
            gob.wide_beams.iter().chain(gob.narrow_beams.iter()).map(|b| b.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 148);
    }

    #[test]
    fn narrow_beams_inside_parent_footprint() {
        let (cfg, layout) = defaults();
        let gob = synthesize_gob(&cfg, &layout).unwrap();
        for nb in &gob.narrow_beams {
            let wb = nb.parent_wb.unwrap() as usize;
            let cell = &gob.wb_cells[wb];
            assert!(cell.contains(nb.az_steer_deg, nb.el_steer_deg));
            assert_eq!(gob.nb_to_wb[&nb.id], wb as u32);
            // The containing cell is unique, so nb_to_wb points at the WB
            // whose footprint holds the steering direction.
            for (other, cell2) in gob.wb_cells.iter().enumerate() {
                if other != wb {
                    let strictly_inside = nb.az_steer_deg > cell2.az_lo + 1e-9
                        && nb.az_steer_deg < cell2.az_hi - 1e-9
                        && nb.el_steer_deg > cell2.el_lo + 1e-9
                        && nb.el_steer_deg < cell2.el_hi - 1e-9;
                    assert!(!strictly_inside);
                }
            }
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let (cfg, layout) = defaults();
        let a = synthesize_gob(&cfg, &layout).unwrap().to_csv();
        let b = synthesize_gob(&cfg, &layout).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_single_beam_layout() {
        let cfg = ArrayConfig::<f64>::default();
        let layout = GobLayout {
            wb_az_count: 1,
            wb_el_count: 1,
            nb_per_wb: vec![1],
            nb_total: 1,
            ..GobLayout::default()
        };
        let gob = synthesize_gob(&cfg, &layout).unwrap();
        assert_eq!(gob.wide_beams.len(), 1);
        assert_eq!(gob.narrow_beams.len(), 1);
        let wb = &gob.wide_beams[0];
        let nb = &gob.narrow_beams[0];
        assert!((wb.az_steer_deg - nb.az_steer_deg).abs() < 1e-12);
        assert!((wb.el_steer_deg - nb.el_steer_deg).abs() < 1e-12);
    }

    #[test]
    fn layout_total_mismatch_rejected() {
        let cfg = ArrayConfig::<f64>::default();
        let layout = GobLayout { nb_total: 135, ..GobLayout::default() };
        assert!(matches!(synthesize_gob(&cfg, &layout), Err(Error::Layout(_))));
    }

    #[test]
    fn csv_header_and_width() {
        let (cfg, layout) = defaults();
        let csv = synthesize_gob(&cfg, &layout).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "beam_id,kind,az_steer_deg,el_steer_deg,parent_wb");
        assert_eq!(csv.lines().count(), 1 + 148);
    }

    #[test]
    fn works_in_f32() {
        let p = ElementPattern::<f32>::default();
        assert_eq!(element_gain(&p, 0.0f32, 0.0), 8.0);
        let cfg = ArrayConfig::<f32>::default();
        let layout = GobLayout::<f32>::default();
        let gob = synthesize_gob(&cfg, &layout).unwrap();
        assert_eq!(gob.narrow_beams.len(), 136);
    }
}
