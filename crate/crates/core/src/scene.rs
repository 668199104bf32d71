//! Site geometry and labeled UE populations.
//!
//! The sector is a regular hexagon with the base station at one corner and
//! the panel boresight pointing at the opposite corner (+y). Two straight
//! lanes run east-west in front of the BS: a pavement for the slow classes
//! and a street for the vehicular ones. A configurable share of pedestrians
//! crosses the street northward (away from the BS) partway through their
//! walk.

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Vec3};
use crate::num::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// Sector and lane geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SiteConfig<R> {
    pub sector_radius_m: R,
    pub bs_height_m: R,
    pub ue_height_m: R,
    pub protection_radius_m: R,
    pub fov_az_deg: R,
    pub fov_el_deg: R,
    /// Perpendicular distance from the BS to the pavement lane.
    pub pavement_offset_m: R,
    /// Perpendicular distance from the BS to the street lane.
    pub street_offset_m: R,
    /// Lanes stop this far short of the sector boundary.
    pub lane_margin_m: R,
    /// How far a crossing pedestrian walks north before leaving the scene.
    pub crossing_length_m: R,
}

impl<R: Real> Default for SiteConfig<R> {
    fn default() -> Self {
        Self {
            sector_radius_m: R::of(200.0),
            bs_height_m: R::of(30.0),
            ue_height_m: R::of(1.5),
            protection_radius_m: R::of(5.0),
            fov_az_deg: R::of(120.0),
            fov_el_deg: R::of(40.0),
            pavement_offset_m: R::of(20.0),
            street_offset_m: R::of(25.0),
            lane_margin_m: R::of(1.0),
            crossing_length_m: R::of(12.0),
        }
    }
}

impl<R: Real> SiteConfig<R> {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            self.sector_radius_m,
            self.bs_height_m,
            self.ue_height_m,
            self.protection_radius_m,
            self.fov_az_deg,
            self.fov_el_deg,
            self.pavement_offset_m,
            self.street_offset_m,
            self.crossing_length_m,
        ];
        if pos.iter().any(|&v| v <= R::zero()) {
            return Err(Error::config("site lengths and spans must be positive"));
        }
        if self.protection_radius_m >= self.sector_radius_m {
            return Err(Error::config("protection radius must be smaller than the sector radius"));
        }
        for (name, off) in [("pavement", self.pavement_offset_m), ("street", self.street_offset_m)] {
            if off < self.protection_radius_m {
                return Err(Error::config(format!(
                    "{name} lane would violate the {} m protection radius",
                    self.protection_radius_m
                )));
            }
            // Lanes must sit in the near half of the hexagon where the
            // cross-section is bounded by the two BS edges.
            if off >= self.sector_radius_m * R::of(0.5) {
                return Err(Error::config(format!("{name} lane lies too deep in the sector")));
            }
        }
        Ok(())
    }
}

/// UE mobility class; the classification target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UeClass {
    Pedestrian,
    Bicycle,
    Car,
    Bus,
    Motorcycle,
}

impl UeClass {
    pub const ALL: [UeClass; 5] =
        [UeClass::Pedestrian, UeClass::Bicycle, UeClass::Car, UeClass::Bus, UeClass::Motorcycle];

    pub fn name(self) -> &'static str {
        match self {
            UeClass::Pedestrian => "pedestrian",
            UeClass::Bicycle => "bicycle",
            UeClass::Car => "car",
            UeClass::Bus => "bus",
            UeClass::Motorcycle => "motorcycle",
        }
    }

    /// Street-lane (vehicular) classes.
    pub fn is_fast(self) -> bool {
        matches!(self, UeClass::Car | UeClass::Bus | UeClass::Motorcycle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubBehavior {
    None,
    CrossesStreet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaneId {
    Pavement,
    Street,
}

/// A straight lane: ordered waypoints plus travel direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaneModel<R> {
    pub lane_id: LaneId,
    pub polyline: Vec<Vec3<R>>,
    pub direction: Vec3<R>,
}

impl<R: Real> LaneModel<R> {
    pub fn length(&self) -> R {
        let mut total = R::zero();
        for w in self.polyline.windows(2) {
            total += w[0].distance(w[1]);
        }
        total
    }

    /// Point at the given arc length from the lane start (clamped).
    pub fn point_at(&self, arc: R) -> Vec3<R> {
        let mut remaining = arc.max(R::zero());
        for w in self.polyline.windows(2) {
            let seg = w[0].distance(w[1]);
            if remaining <= seg {
                let t = if seg > R::zero() { remaining / seg } else { R::zero() };
                return w[0].add(w[1].sub(w[0]).scale(t));
            }
            remaining -= seg;
        }
        *self.polyline.last().expect("lane has waypoints")
    }
}

/// Built site: BS position, sector boundary, lanes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Site<R> {
    pub config: SiteConfig<R>,
    pub bs_ground: Vec3<R>,
    pub bs_antenna: Vec3<R>,
    pub sector: ConvexPolygon<R>,
    pub pavement: LaneModel<R>,
    pub street: LaneModel<R>,
}

impl<R: Real> Site<R> {
    pub fn lane(&self, id: LaneId) -> &LaneModel<R> {
        match id {
            LaneId::Pavement => &self.pavement,
            LaneId::Street => &self.street,
        }
    }

    /// Position of a track at absolute time `t` (seconds); `None` before
    /// spawn and after route completion. Crossing pedestrians divert
    /// northward at their trigger arc length and keep walking at the same
    /// speed until `crossing_length_m` is covered.
    pub fn position_at(&self, track: &UeTrack<R>, t: R) -> Option<Vec3<R>> {
        if t < track.spawn_time_s {
            return None;
        }
        let lane = self.lane(track.lane);
        let arc = track.start_offset_m + track.speed_mps * (t - track.spawn_time_s);
        if let Some(trigger) = track.cross_trigger_m {
            if arc > trigger {
                let walked = arc - trigger;
                if walked > self.config.crossing_length_m {
                    return None;
                }
                let base = lane.point_at(trigger);
                return Some(Vec3::new(base.x, base.y + walked, base.z));
            }
        }
        if arc > lane.length() {
            return None;
        }
        Some(lane.point_at(arc))
    }

    /// Absolute time interval `[spawn, end]` during which the track exists.
    pub fn active_interval(&self, track: &UeTrack<R>) -> (R, R) {
        let lane = self.lane(track.lane);
        let end_arc = match track.cross_trigger_m {
            Some(trigger) => trigger + self.config.crossing_length_m,
            None => lane.length(),
        };
        let travel = (end_arc - track.start_offset_m).max(R::zero()) / track.speed_mps;
        (track.spawn_time_s, track.spawn_time_s + travel)
    }
}

/// Build the hexagonal sector with the BS at its southern corner and the two
/// lanes in front of it.
pub fn build_site<R: Real>(config: SiteConfig<R>) -> Result<Site<R>> {
    config.validate()?;
    let r = config.sector_radius_m;
    let half = R::of(0.5);
    let s3h = R::of(0.75).sqrt(); // sqrt(3)/2

    // Regular hexagon, BS vertex at the origin, center at (0, r).
    let vertices = vec![
        Vec3::new(R::zero(), R::zero(), R::zero()),
        Vec3::new(r * s3h, r * half, R::zero()),
        Vec3::new(r * s3h, r + r * half, R::zero()),
        Vec3::new(R::zero(), r + r, R::zero()),
        Vec3::new(-(r * s3h), r + r * half, R::zero()),
        Vec3::new(-(r * s3h), r * half, R::zero()),
    ];
    let sector = ConvexPolygon { vertices };

    let make_lane = |lane_id: LaneId, offset: R| -> LaneModel<R> {
        // Near the BS corner the hexagon is bounded by the two edges leaving
        // the BS at +-60 degrees, so the half width at distance y is y tan 60.
        let half_width = offset * R::of(3.0).sqrt() - config.lane_margin_m;
        LaneModel {
            lane_id,
            polyline: vec![
                Vec3::new(-half_width, offset, config.ue_height_m),
                Vec3::new(half_width, offset, config.ue_height_m),
            ],
            direction: Vec3::new(R::one(), R::zero(), R::zero()),
        }
    };

    let site = Site {
        bs_ground: Vec3::zero(),
        bs_antenna: Vec3::new(R::zero(), R::zero(), config.bs_height_m),
        sector,
        pavement: make_lane(LaneId::Pavement, config.pavement_offset_m),
        street: make_lane(LaneId::Street, config.street_offset_m),
        config,
    };

    for lane in [&site.pavement, &site.street] {
        for p in &lane.polyline {
            let ground = Vec3::new(p.x, p.y, R::zero());
            if ground.distance(site.bs_ground) < site.config.protection_radius_m {
                return Err(Error::config("lane waypoint inside the protection radius"));
            }
            if !site.sector.contains_xy(*p) {
                return Err(Error::config("lane waypoint outside the sector"));
            }
        }
    }
    Ok(site)
}

/// A labeled UE with its trajectory parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UeTrack<R> {
    pub ue_id: u32,
    pub class: UeClass,
    pub sub_behavior: SubBehavior,
    pub lane: LaneId,
    pub speed_mps: R,
    pub start_offset_m: R,
    pub spawn_time_s: R,
    /// Co-moving group (several UEs in one vehicle); `None` for singles.
    pub group_id: Option<u32>,
    /// Arc length at which a crossing pedestrian turns north.
    pub cross_trigger_m: Option<R>,
}

/// Requested UE count per class.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassCounts {
    pub pedestrian: usize,
    pub bicycle: usize,
    pub car: usize,
    pub bus: usize,
    pub motorcycle: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.pedestrian + self.bicycle + self.car + self.bus + self.motorcycle
    }

    pub fn get(&self, class: UeClass) -> usize {
        match class {
            UeClass::Pedestrian => self.pedestrian,
            UeClass::Bicycle => self.bicycle,
            UeClass::Car => self.car,
            UeClass::Bus => self.bus,
            UeClass::Motorcycle => self.motorcycle,
        }
    }
}

/// Randomization knobs for population generation. Speed bands keep the slow
/// classes on clearly separated velocities and the vehicular classes inside
/// the common 8-17 m/s street band.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PopulationConfig<R> {
    pub pedestrian_speed_mps: (R, R),
    pub bicycle_speed_mps: (R, R),
    pub car_speed_mps: (R, R),
    pub bus_speed_mps: (R, R),
    pub motorcycle_speed_mps: (R, R),
    /// Maximum co-moving UEs per car / per bus.
    pub car_group_max: usize,
    pub bus_group_max: usize,
    /// Probability that a UE emerges at an intermediate route point.
    pub intermediate_spawn_prob: R,
    /// Intermediate starts are drawn in `[0, max_start_frac * route length]`.
    pub max_start_frac: R,
    /// Spawn times are drawn uniformly in `[0, spawn_window_s]`.
    pub spawn_window_s: R,
}

impl<R: Real> Default for PopulationConfig<R> {
    fn default() -> Self {
        Self {
            pedestrian_speed_mps: (R::of(1.0), R::of(1.8)),
            bicycle_speed_mps: (R::of(3.5), R::of(6.5)),
            car_speed_mps: (R::of(10.0), R::of(13.0)),
            bus_speed_mps: (R::of(8.0), R::of(10.0)),
            motorcycle_speed_mps: (R::of(14.0), R::of(17.0)),
            car_group_max: 2,
            bus_group_max: 8,
            intermediate_spawn_prob: R::of(0.5),
            max_start_frac: R::of(0.6),
            spawn_window_s: R::of(60.0),
        }
    }
}

impl<R: Real> PopulationConfig<R> {
    pub fn speed_band(&self, class: UeClass) -> (R, R) {
        match class {
            UeClass::Pedestrian => self.pedestrian_speed_mps,
            UeClass::Bicycle => self.bicycle_speed_mps,
            UeClass::Car => self.car_speed_mps,
            UeClass::Bus => self.bus_speed_mps,
            UeClass::Motorcycle => self.motorcycle_speed_mps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for class in UeClass::ALL {
            let (lo, hi) = self.speed_band(class);
            if lo <= R::zero() || hi < lo {
                return Err(Error::config(format!("bad speed band for {}", class.name())));
            }
        }
        if self.car_group_max < 1 || self.bus_group_max < 1 {
            return Err(Error::config("group sizes must be at least 1"));
        }
        if self.intermediate_spawn_prob < R::zero() || self.intermediate_spawn_prob > R::one() {
            return Err(Error::config("intermediate_spawn_prob must lie in [0, 1]"));
        }
        if self.max_start_frac < R::zero() || self.max_start_frac >= R::one() {
            return Err(Error::config("max_start_frac must lie in [0, 1)"));
        }
        if self.spawn_window_s < R::zero() {
            return Err(Error::config("spawn_window_s must be >= 0"));
        }
        Ok(())
    }
}

fn uniform<R: Real>(rng: &mut ChaCha12Rng, lo: R, hi: R) -> R {
    if hi <= lo {
        return lo;
    }
    lo + (hi - lo) * R::of(rng.gen::<f64>())
}

/// Generate the labeled population. Deterministic for a given
/// (counts, crossing_fraction, seed, config) tuple: UE ids are assigned
/// class by class in `UeClass::ALL` order.
pub fn spawn_population<R: Real>(
    site: &Site<R>,
    counts: &ClassCounts,
    crossing_fraction: R,
    seed: u64,
    config: &PopulationConfig<R>,
) -> Result<Vec<UeTrack<R>>> {
    config.validate()?;
    if crossing_fraction < R::zero() || crossing_fraction > R::one() {
        return Err(Error::config("crossing_fraction must lie in [0, 1]"));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracks: Vec<UeTrack<R>> = Vec::with_capacity(counts.total());
    let mut next_group = 0u32;

    for class in UeClass::ALL {
        let n = counts.get(class);
        if n == 0 {
            continue;
        }
        let lane_id = if class.is_fast() { LaneId::Street } else { LaneId::Pavement };
        let lane_len = site.lane(lane_id).length();
        let (lo, hi) = config.speed_band(class);
        let group_max = match class {
            UeClass::Car => config.car_group_max,
            UeClass::Bus => config.bus_group_max,
            _ => 1,
        };

        let mut remaining = n;
        while remaining > 0 {
            let size = if group_max > 1 { rng.gen_range(1..=group_max).min(remaining) } else { 1 };
            let speed = uniform(&mut rng, lo, hi);
            let spawn_time = uniform(&mut rng, R::zero(), config.spawn_window_s);
            let start = if R::of(rng.gen::<f64>()) < config.intermediate_spawn_prob {
                uniform(&mut rng, R::zero(), config.max_start_frac * lane_len)
            } else {
                R::zero()
            };
            let group_id = if size > 1 {
                next_group += 1;
                Some(next_group)
            } else {
                None
            };
            for member in 0..size {
                tracks.push(UeTrack {
                    ue_id: tracks.len() as u32,
                    class,
                    sub_behavior: SubBehavior::None,
                    lane: lane_id,
                    speed_mps: speed,
                    start_offset_m: start + R::of_usize(member),
                    spawn_time_s: spawn_time,
                    group_id,
                    cross_trigger_m: None,
                });
            }
            remaining -= size;
        }
    }

    // Pick which pedestrians cross, uniformly at random.
    let ped_ids: Vec<usize> = tracks
        .iter()
        .enumerate()
        .filter(|(_, t)| t.class == UeClass::Pedestrian)
        .map(|(i, _)| i)
        .collect();
    let n_cross_f = (crossing_fraction * R::of_usize(ped_ids.len())).round().as_f64();
    let n_cross = (n_cross_f.max(0.0) as usize).min(ped_ids.len());
    let mut shuffled = ped_ids;
    // Fisher-Yates on the pedestrian index list.
    for i in (1..shuffled.len()).rev() {
        let j = rng.gen_range(0..=i);
        shuffled.swap(i, j);
    }
    let lane_len = site.lane(LaneId::Pavement).length();
    for &idx in shuffled.iter().take(n_cross) {
        let t = &mut tracks[idx];
        let lo = t.start_offset_m + R::one();
        let hi = lane_len * R::of(0.95);
        let trigger = if lo < hi { uniform(&mut rng, lo, hi) } else { t.start_offset_m };
        t.sub_behavior = SubBehavior::CrossesStreet;
        t.cross_trigger_m = Some(trigger);
    }

    Ok(tracks)
}

/// Ground-truth manifest record, one JSONL line per UE.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRecord<R> {
    pub ue_id: u32,
    pub class: UeClass,
    pub sub_behavior: SubBehavior,
    pub lane: LaneId,
    pub speed_mps: R,
    pub spawn_time_s: R,
    pub group_id: Option<u32>,
}

impl<R: Real> ManifestRecord<R> {
    pub fn from_track(t: &UeTrack<R>) -> Self {
        Self {
            ue_id: t.ue_id,
            class: t.class,
            sub_behavior: t.sub_behavior,
            lane: t.lane,
            speed_mps: t.speed_mps,
            spawn_time_s: t.spawn_time_s,
            group_id: t.group_id,
        }
    }
}

pub fn write_manifest<R: Real>(tracks: &[UeTrack<R>], path: &Path) -> Result<()> {
    let mut out = fs::File::create(path)?;
    for t in tracks {
        let line = serde_json::to_string(&ManifestRecord::from_track(t))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_manifest<R: Real>(path: &Path) -> Result<Vec<ManifestRecord<R>>> {
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ManifestRecord<R> = serde_json::from_str(line)
            .map_err(|e| Error::Data(format!("manifest line {}: {e}", i + 1)))?;
        records.push(rec);
    }
    Ok(records)
}
