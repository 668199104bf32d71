//! Beam management: wide-beam acquisition, narrow-beam tracking sweeps,
//! switch decisions, and the report-emitting simulation loop.
//!
//! The loop is a discrete-time reconstruction of the gNB-side refinement
//! procedure: each UE holds a serving wide beam, the narrow beams of that
//! wide beam are swept every report period, the strongest measurements are
//! packed into a fixed-width report, and the serving narrow beam switches
//! whenever a better one shows up. Wide-beam re-acquisition kicks in when
//! the serving narrow beam falls a margin below the best wide beam.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::link::{rsrp, rsrp_mean_dbm, BeamMeasurement, LinkBudgetConfig};
use crate::num::Real;
use crate::paam::{ArrayConfig, Beam, GridOfBeams};
use crate::scene::{Site, UeTrack};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Per-UE tracking state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServingState {
    pub ue_id: u32,
    pub serving_wb: u32,
    pub serving_nb: u32,
}

/// One L2 measurement report: exactly `R` (narrow beam, RSRP) pairs sorted
/// by descending RSRP. `ue_id` is ground truth for label joins only and is
/// never exposed as a feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementReport<R> {
    pub ue_id: u32,
    pub t_s: R,
    pub entries: Vec<BeamMeasurement<R>>,
    pub serving_nb: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScope {
    /// Sweep only the serving wide beam's children (padded up to the report
    /// width from adjacent wide beams when the cell is small).
    ServingWbOnly,
    /// Sweep the serving wide beam and its grid neighbors, keep the top R.
    ServingPlusNeighbors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaddingRule {
    /// Fill missing slots with the strongest beams of adjacent wide beams.
    AdjacentBest,
    /// Fill missing slots with out-of-codebook indices at a -200 dBm floor.
    Sentinel,
}

/// Simulation clock and tracking-policy parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig<R> {
    pub report_period_s: R,
    pub duration_s: R,
    pub seeds: Vec<u64>,
    pub switch_hysteresis_db: R,
    pub sweep_scope: SweepScope,
    pub padding: PaddingRule,
    /// Entries per report.
    pub report_width: usize,
    /// Re-acquire the wide beam when the serving NB drops this far below
    /// the best wide beam.
    pub reacquisition_margin_db: R,
    /// Optional per-UE constant phase offset on the report grid.
    pub report_jitter_s: R,
}

impl<R: Real> Default for SimulationConfig<R> {
    fn default() -> Self {
        Self {
            report_period_s: R::of(0.040),
            duration_s: R::of(130.0),
            seeds: vec![7],
            switch_hysteresis_db: R::zero(),
            sweep_scope: SweepScope::ServingWbOnly,
            padding: PaddingRule::AdjacentBest,
            report_width: 12,
            reacquisition_margin_db: R::of(3.0),
            report_jitter_s: R::zero(),
        }
    }
}

impl<R: Real> SimulationConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if self.report_period_s <= R::zero() {
            return Err(Error::config("report_period_s must be positive"));
        }
        if self.duration_s <= R::zero() {
            return Err(Error::config("duration_s must be positive"));
        }
        if self.report_width == 0 {
            return Err(Error::config("report_width must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("at least one seed is required"));
        }
        if self.report_jitter_s < R::zero() {
            return Err(Error::config("report_jitter_s must be >= 0"));
        }
        Ok(())
    }
}

/// Bundles the immutable pieces the tracking decisions need.
pub struct Radio<'a, R> {
    pub array: &'a ArrayConfig<R>,
    pub gob: &'a GridOfBeams<R>,
    pub link: &'a LinkBudgetConfig<R>,
    pub bs_pos: Vec3<R>,
}

impl<'a, R: Real> Radio<'a, R> {
    pub fn new(
        array: &'a ArrayConfig<R>,
        gob: &'a GridOfBeams<R>,
        link: &'a LinkBudgetConfig<R>,
        bs_pos: Vec3<R>,
    ) -> Self {
        Self { array, gob, link, bs_pos }
    }

    /// Shadowing-free RSRP of a beam at a position (control-plane metric).
    pub fn rsrp_sigma0(&self, beam: &Beam<R>, ue_pos: Vec3<R>) -> R {
        rsrp_mean_dbm(self.array, self.link, beam, self.bs_pos, ue_pos)
            .expect("ue position distinct from bs")
    }

    /// Initial/maintenance wide-beam selection: strongest wide beam by
    /// shadowing-free RSRP, ties broken toward the lowest beam id.
    pub fn acquire_wb(&self, ue_pos: Vec3<R>) -> u32 {
        let mut best_id = self.gob.wide_beams[0].id;
        let mut best = R::neg_infinity();
        for wb in &self.gob.wide_beams {
            let v = self.rsrp_sigma0(wb, ue_pos);
            if v > best {
                best = v;
                best_id = wb.id;
            }
        }
        best_id
    }

    fn best_wb_with_rsrp(&self, ue_pos: Vec3<R>) -> (u32, R) {
        let id = self.acquire_wb(ue_pos);
        let beam = self.gob.beam(id).expect("wide beam exists");
        (id, self.rsrp_sigma0(beam, ue_pos))
    }

    /// Strongest child narrow beam of a wide beam (shadowing-free).
    pub fn best_nb_in(&self, wb_id: u32, ue_pos: Vec3<R>) -> u32 {
        let mut best_id = None;
        let mut best = R::neg_infinity();
        for nb in self.gob.children_of(wb_id) {
            let v = self.rsrp_sigma0(nb, ue_pos);
            if v > best {
                best = v;
                best_id = Some(nb.id);
            }
        }
        best_id.expect("wide beam has children")
    }

    /// Wide beams adjacent to `wb_id` in the WB grid (including diagonals),
    /// in ascending id order.
    fn adjacent_wbs(&self, wb_id: u32) -> Vec<u32> {
        let (el, az) = self.gob.wb_grid_pos(wb_id);
        let mut out = Vec::new();
        for wb in &self.gob.wide_beams {
            if wb.id == wb_id {
                continue;
            }
            let (e2, a2) = self.gob.wb_grid_pos(wb.id);
            if el.abs_diff(e2) <= 1 && az.abs_diff(a2) <= 1 {
                out.push(wb.id);
            }
        }
        out
    }

    /// Sweep the narrow beams in scope and emit a fixed-width report.
    pub fn p2_sweep<G: Rng + ?Sized>(
        &self,
        state: &ServingState,
        ue_pos: Vec3<R>,
        t_s: R,
        width: usize,
        scope: SweepScope,
        padding: PaddingRule,
        rng: &mut G,
    ) -> Result<MeasurementReport<R>> {
        let mut scope_wbs = vec![state.serving_wb];
        if scope == SweepScope::ServingPlusNeighbors {
            scope_wbs.extend(self.adjacent_wbs(state.serving_wb));
            scope_wbs.sort_unstable();
        }

        let mut entries: Vec<BeamMeasurement<R>> = Vec::new();
        for &wb in &scope_wbs {
            for nb in self.gob.children_of(wb) {
                entries.push(rsrp(self.array, self.link, nb, self.bs_pos, ue_pos, rng)?);
            }
        }

        if entries.len() < width {
            match padding {
                PaddingRule::AdjacentBest => {
                    let mut ring: Vec<u32> = self
                        .adjacent_wbs(state.serving_wb)
                        .into_iter()
                        .filter(|id| !scope_wbs.contains(id))
                        .collect();
                    // Fall back to the rest of the codebook if the grid
                    // neighborhood still cannot fill the report.
                    ring.extend(
                        self.gob
                            .wide_beams
                            .iter()
                            .map(|b| b.id)
                            .filter(|id| !scope_wbs.contains(id) && !ring.contains(id)),
                    );
                    let mut candidates: Vec<BeamMeasurement<R>> = Vec::new();
                    for wb in ring {
                        for nb in self.gob.children_of(wb) {
                            candidates
                                .push(rsrp(self.array, self.link, nb, self.bs_pos, ue_pos, rng)?);
                        }
                    }
                    sort_desc(&mut candidates);
                    let missing = width - entries.len();
                    if candidates.len() < missing {
                        return Err(Error::config(format!(
                            "report width {width} exceeds the {} narrow beams in the codebook",
                            entries.len() + candidates.len()
                        )));
                    }
                    entries.extend(candidates.into_iter().take(missing));
                }
                PaddingRule::Sentinel => {
                    let base = (self.gob.wide_beams.len() + self.gob.narrow_beams.len()) as u32;
                    let floor = R::of(-200.0);
                    for j in 0..(width - entries.len()) {
                        entries.push(BeamMeasurement { nb_index: base + j as u32, rsrp_dbm: floor });
                    }
                }
            }
        }

        sort_desc(&mut entries);
        entries.truncate(width);
        Ok(MeasurementReport { ue_id: state.ue_id, t_s, entries, serving_nb: state.serving_nb })
    }
}

fn sort_desc<R: Real>(entries: &mut [BeamMeasurement<R>]) {
    entries.sort_by(|a, b| {
        b.rsrp_dbm
            .partial_cmp(&a.rsrp_dbm)
            .expect("rsrp is finite")
            .then(a.nb_index.cmp(&b.nb_index))
    });
}

/// Switch rule: adopt the report's best narrow beam when it beats the
/// serving one by more than the hysteresis. A serving beam missing from the
/// report (truncated out by stronger ones) always loses.
pub fn maybe_switch<R: Real>(
    gob: &GridOfBeams<R>,
    state: &ServingState,
    report: &MeasurementReport<R>,
    hysteresis_db: R,
) -> ServingState {
    let best = match report.entries.first() {
        Some(e) => e,
        None => return *state,
    };
    if best.nb_index == state.serving_nb {
        return *state;
    }
    let serving_rsrp = report
        .entries
        .iter()
        .find(|e| e.nb_index == state.serving_nb)
        .map(|e| e.rsrp_dbm);
    let should_switch = match serving_rsrp {
        Some(s) => best.rsrp_dbm > s + hysteresis_db,
        None => true,
    };
    if !should_switch {
        return *state;
    }
    match gob.nb_to_wb.get(&best.nb_index) {
        Some(&wb) => ServingState { ue_id: state.ue_id, serving_wb: wb, serving_nb: best.nb_index },
        // Sentinel indices are not switch targets.
        None => *state,
    }
}

fn ue_rng(seed: u64, ue_id: u32) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ (ue_id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Run the time-stepped beam-management loop over a population and collect
/// the emitted reports in (time step, ue id) order.
pub fn run_simulation<R: Real>(
    site: &Site<R>,
    array: &ArrayConfig<R>,
    gob: &GridOfBeams<R>,
    link: &LinkBudgetConfig<R>,
    tracks: &[UeTrack<R>],
    sim: &SimulationConfig<R>,
    seed: u64,
) -> Result<Vec<MeasurementReport<R>>> {
    sim.validate()?;
    link.validate()?;
    if sim.padding == PaddingRule::AdjacentBest && sim.report_width > gob.narrow_beams.len() {
        return Err(Error::config(format!(
            "report width {} exceeds the {} narrow beams in the codebook",
            sim.report_width,
            gob.narrow_beams.len()
        )));
    }

    struct UeSim<R> {
        state: Option<ServingState>,
        rng: ChaCha12Rng,
        jitter: R,
    }

    let mut order: Vec<usize> = (0..tracks.len()).collect();
    order.sort_by_key(|&i| tracks[i].ue_id);

    let mut sims: Vec<UeSim<R>> = tracks
        .iter()
        .map(|t| {
            let mut rng = ue_rng(seed, t.ue_id);
            let jitter = if sim.report_jitter_s > R::zero() {
                sim.report_jitter_s * R::of(rng.gen::<f64>())
            } else {
                R::zero()
            };
            UeSim { state: None, rng, jitter }
        })
        .collect();

    let radio = Radio::new(array, gob, link, site.bs_antenna);
    let n_steps = (sim.duration_s / sim.report_period_s + R::of(1e-9)).floor().as_f64() as usize;
    let mut reports = Vec::new();

    for k in 0..n_steps {
        let t = sim.report_period_s * R::of_usize(k);
        for &i in &order {
            let track = &tracks[i];
            let ue = &mut sims[i];
            let t_ue = t + ue.jitter;
            let pos = match site.position_at(track, t_ue) {
                Some(p) => p,
                None => {
                    ue.state = None;
                    continue;
                }
            };

            let mut state = match ue.state {
                Some(s) => {
                    // Re-acquire when the serving NB falls below the best WB
                    // by the margin (the UE left the serving footprint).
                    let nb = gob.beam(s.serving_nb).expect("serving nb exists");
                    let nb_rsrp = radio.rsrp_sigma0(nb, pos);
                    let (best_wb, best_wb_rsrp) = radio.best_wb_with_rsrp(pos);
                    if nb_rsrp < best_wb_rsrp - sim.reacquisition_margin_db {
                        ServingState {
                            ue_id: track.ue_id,
                            serving_wb: best_wb,
                            serving_nb: radio.best_nb_in(best_wb, pos),
                        }
                    } else {
                        s
                    }
                }
                None => {
                    let wb = radio.acquire_wb(pos);
                    ServingState {
                        ue_id: track.ue_id,
                        serving_wb: wb,
                        serving_nb: radio.best_nb_in(wb, pos),
                    }
                }
            };

            let report = radio.p2_sweep(
                &state,
                pos,
                t_ue,
                sim.report_width,
                sim.sweep_scope,
                sim.padding,
                &mut ue.rng,
            )?;
            state = maybe_switch(gob, &state, &report, sim.switch_hysteresis_db);
            ue.state = Some(state);
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Write reports as CSV: `t_s,ue_id,serving_nb,nb_1..nb_R,rsrp_1..rsrp_R`.
pub fn write_reports_csv<R: Real>(
    reports: &[MeasurementReport<R>],
    width: usize,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    out.push_str("t_s,ue_id,serving_nb");
    for i in 1..=width {
        let _ = write!(out, ",nb_{i}");
    }
    for i in 1..=width {
        let _ = write!(out, ",rsrp_{i}");
    }
    out.push('\n');
    for r in reports {
        if r.entries.len() != width {
            return Err(Error::Dimension { expected: width, actual: r.entries.len() });
        }
        let _ = write!(out, "{:.4},{},{}", r.t_s.as_f64(), r.ue_id, r.serving_nb);
        for e in &r.entries {
            let _ = write!(out, ",{}", e.nb_index);
        }
        for e in &r.entries {
            let _ = write!(out, ",{:.4}", e.rsrp_dbm.as_f64());
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write reports as JSONL (one report object per line).
pub fn write_reports_jsonl<R: Real>(reports: &[MeasurementReport<R>], path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}", serde_json::to_string(r)?);
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a report CSV produced by [`write_reports_csv`]. The report width is
/// recovered from the header.
pub fn read_reports_csv<R: Real>(path: &Path) -> Result<(Vec<MeasurementReport<R>>, usize)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::data("empty report file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    let width = cols.iter().filter(|c| c.starts_with("nb_")).count();
    if width == 0 || cols.len() != 3 + 2 * width {
        return Err(Error::data("malformed report header"));
    }

    let mut reports = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Data(format!(
                "report line {}: expected {} fields, got {}",
                lineno + 2,
                cols.len(),
                fields.len()
            )));
        }
        let parse_err = |what: &str| Error::Data(format!("report line {}: bad {what}", lineno + 2));
        let t_s = R::of(fields[0].parse::<f64>().map_err(|_| parse_err("t_s"))?);
        let ue_id: u32 = fields[1].parse().map_err(|_| parse_err("ue_id"))?;
        let serving_nb: u32 = fields[2].parse().map_err(|_| parse_err("serving_nb"))?;
        let mut entries = Vec::with_capacity(width);
        for i in 0..width {
            let nb_index: u32 = fields[3 + i].parse().map_err(|_| parse_err("nb index"))?;
            let rsrp_dbm =
                R::of(fields[3 + width + i].parse::<f64>().map_err(|_| parse_err("rsrp"))?);
            entries.push(BeamMeasurement { nb_index, rsrp_dbm });
        }
        reports.push(MeasurementReport { ue_id, t_s, entries, serving_nb });
    }
    Ok((reports, width))
}
