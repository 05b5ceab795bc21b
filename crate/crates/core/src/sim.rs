//! Kinematic 2D simulator of disk-shaped differential-drive robots and
//! passive cylindrical objects.
//!
//! Robots integrate exact circular arcs for constant wheel speeds, contacts
//! are resolved by projecting overlapping disks apart along their centre
//! line, and each robot carries a single forward-facing sensor that reports
//! the kind of the nearest body it sees.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Largest overlap tolerated after a physics substep, in cm.
pub const OVERLAP_TOLERANCE: f64 = 1e-6;

/// Placement attempts per body before a configuration is declared over-dense.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose {
            x,
            y,
            heading: wrap_angle(heading),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Agent,
    Replica,
    Object,
}

impl BodyKind {
    pub fn is_robot(self) -> bool {
        !matches!(self, BodyKind::Object)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BodyKind::Agent => "agent",
            BodyKind::Replica => "replica",
            BodyKind::Object => "object",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    pub pose: Pose,
    /// Pose at the start of the current control cycle.
    pub last_pose: Pose,
    pub radius: f64,
    pub mass: f64,
    pub kind: BodyKind,
    /// Wheel command as a fraction of maximum speed, after noise.
    pub wheel_command: (f64, f64),
    velocity: (f64, f64),
}

impl Body {
    fn new(kind: BodyKind, pose: Pose, radius: f64, mass: f64) -> Self {
        Body {
            pose,
            last_pose: pose,
            radius,
            mass,
            kind,
            wheel_command: (0.0, 0.0),
            velocity: (0.0, 0.0),
        }
    }
}

fn default_robot_mass() -> f64 {
    150.0
}

fn default_collision_sweeps() -> usize {
    8
}

/// Physical and experimental constants of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub n_agents: usize,
    pub n_replicas: usize,
    pub n_objects: usize,
    /// Side of the square, centred on the origin, where bodies start.
    pub init_square_side: f64,
    pub body_diameter: f64,
    #[serde(default = "default_robot_mass")]
    pub robot_mass: f64,
    pub inter_wheel_distance: f64,
    pub max_speed: f64,
    pub object_diameter: f64,
    pub object_mass: f64,
    /// Kept for reference; contact resolution uses the push rule instead.
    pub object_static_friction: f64,
    pub control_dt: f64,
    pub physics_dt: f64,
    pub wheel_noise_range: (f64, f64),
    pub trial_duration: f64,
    pub sensor_state_count: usize,
    #[serde(default = "default_collision_sweeps")]
    pub collision_sweeps: usize,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            n_agents: 10,
            n_replicas: 1,
            n_objects: 0,
            init_square_side: 331.66,
            body_diameter: 7.0,
            robot_mass: 150.0,
            inter_wheel_distance: 5.1,
            max_speed: 12.8,
            object_diameter: 10.0,
            object_mass: 35.0,
            object_static_friction: 0.58,
            control_dt: 0.1,
            physics_dt: 0.01,
            wheel_noise_range: (0.95, 1.05),
            trial_duration: 10.0,
            sensor_state_count: 2,
            collision_sweeps: 8,
        }
    }
}

impl WorldConfig {
    /// 10 agents and 1 replica in a 331.66 cm square, binary sensor.
    pub fn aggregation() -> Self {
        WorldConfig::default()
    }

    /// 4 agents, 1 replica and 10 objects in a 100 cm square, ternary sensor.
    pub fn clustering() -> Self {
        WorldConfig {
            n_agents: 4,
            n_replicas: 1,
            n_objects: 10,
            init_square_side: 100.0,
            sensor_state_count: 3,
            ..WorldConfig::default()
        }
    }

    pub fn n_robots(&self) -> usize {
        self.n_agents + self.n_replicas
    }

    pub fn n_bodies(&self) -> usize {
        self.n_robots() + self.n_objects
    }

    /// Physics substeps per control cycle.
    pub fn substeps(&self) -> usize {
        (self.control_dt / self.physics_dt).round() as usize
    }

    /// Control cycles per trial.
    pub fn control_steps(&self) -> usize {
        (self.trial_duration / self.control_dt).round() as usize
    }

    /// Largest angular speed a robot can reach, in rad/s.
    pub fn max_turn_rate(&self) -> f64 {
        2.0 * self.max_speed / self.inter_wheel_distance
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let positive = [
            ("init_square_side", self.init_square_side),
            ("body_diameter", self.body_diameter),
            ("robot_mass", self.robot_mass),
            ("inter_wheel_distance", self.inter_wheel_distance),
            ("max_speed", self.max_speed),
            ("object_diameter", self.object_diameter),
            ("object_mass", self.object_mass),
            ("control_dt", self.control_dt),
            ("physics_dt", self.physics_dt),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return fail(format!("{name} must be positive, got {value}"));
            }
        }
        if !(self.trial_duration >= 0.0) {
            return fail(format!("trial_duration must be non-negative, got {}", self.trial_duration));
        }
        let ratio = self.control_dt / self.physics_dt;
        if ratio < 1.0 || (ratio - ratio.round()).abs() > 1e-9 {
            return fail(format!(
                "control_dt ({}) must be an integer multiple of physics_dt ({})",
                self.control_dt, self.physics_dt
            ));
        }
        let (lo, hi) = self.wheel_noise_range;
        if !(lo > 0.0 && lo <= hi) {
            return fail(format!("wheel_noise_range ({lo}, {hi}) is not a valid interval"));
        }
        if !(2..=3).contains(&self.sensor_state_count) {
            return fail(format!(
                "sensor_state_count must be 2 or 3, got {}",
                self.sensor_state_count
            ));
        }
        if self.n_bodies() == 0 {
            return fail("the world needs at least one body".into());
        }
        if self.collision_sweeps == 0 {
            return fail("collision_sweeps must be at least 1".into());
        }
        Ok(())
    }
}

/// The full state of one trial at one instant.
#[derive(Clone, Debug)]
pub struct WorldState {
    /// Agents first, then replicas, then objects.
    pub bodies: Vec<Body>,
    pub time: f64,
    pub sensor_state_count: usize,
    rng: Stream,
}

impl WorldState {
    pub fn n_robots(&self) -> usize {
        self.bodies.iter().filter(|b| b.kind.is_robot()).count()
    }

    pub fn positions(&self) -> Vec<(f64, f64)> {
        self.bodies.iter().map(|b| (b.pose.x, b.pose.y)).collect()
    }

    /// Largest pairwise overlap between bodies, zero when none touch.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.bodies.iter().enumerate() {
            for b in &self.bodies[i + 1..] {
                let d = (a.pose.x - b.pose.x).hypot(a.pose.y - b.pose.y);
                worst = worst.max(a.radius + b.radius - d);
            }
        }
        worst
    }
}

/// Places all bodies uniformly at random in the initial square.
///
/// A body that overlaps an already placed one is redrawn on its own, up to
/// [`MAX_PLACEMENT_ATTEMPTS`] times.
pub fn initialize_world(config: &WorldConfig, rng: Stream) -> Result<WorldState> {
    config.validate()?;
    let mut rng = rng;
    let half = config.init_square_side / 2.0;
    let robot_radius = config.body_diameter / 2.0;
    let object_radius = config.object_diameter / 2.0;

    let specs = std::iter::repeat_n((BodyKind::Agent, robot_radius, config.robot_mass), config.n_agents)
        .chain(std::iter::repeat_n(
            (BodyKind::Replica, robot_radius, config.robot_mass),
            config.n_replicas,
        ))
        .chain(std::iter::repeat_n(
            (BodyKind::Object, object_radius, config.object_mass),
            config.n_objects,
        ));

    let mut bodies: Vec<Body> = Vec::with_capacity(config.n_bodies());
    for (index, (kind, radius, mass)) in specs.enumerate() {
        let span = half - radius;
        if span < 0.0 {
            return Err(Error::OverDense {
                body: index,
                attempts: 0,
                side: config.init_square_side,
            });
        }
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let x = rng.random_range(-span..=span);
            let y = rng.random_range(-span..=span);
            let clear = bodies
                .iter()
                .all(|b| (b.pose.x - x).hypot(b.pose.y - y) >= b.radius + radius);
            if clear {
                placed = Some((x, y));
                break;
            }
        }
        let Some((x, y)) = placed else {
            return Err(Error::OverDense {
                body: index,
                attempts: MAX_PLACEMENT_ATTEMPTS,
                side: config.init_square_side,
            });
        };
        let heading = if kind.is_robot() {
            rng.random_range(-PI..PI)
        } else {
            0.0
        };
        bodies.push(Body::new(kind, Pose::new(x, y, heading), radius, mass));
    }

    Ok(WorldState {
        bodies,
        time: 0.0,
        sensor_state_count: config.sensor_state_count,
        rng,
    })
}

/// What a robot's sensor covers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sensor {
    /// A single ray from the robot's front.
    LineOfSight,
    /// A sector of the given full angle (radians) centred on the heading.
    Sector(f64),
}

/// State code a body produces on the sensor.
fn kind_code(kind: BodyKind, sensor_state_count: usize) -> usize {
    match (kind, sensor_state_count) {
        (BodyKind::Object, 2) => 0,
        (BodyKind::Object, _) => 1,
        (_, 2) => 1,
        (_, _) => 2,
    }
}

/// Distance along a ray at which it enters a disk, if it does.
///
/// `(cx, cy)` is the disk centre relative to the ray origin and `(ux, uy)`
/// the unit direction. A disk containing the origin is entered at 0.
pub fn ray_disk_entry(cx: f64, cy: f64, radius: f64, ux: f64, uy: f64) -> Option<f64> {
    let along = cx * ux + cy * uy;
    let perp = cx * uy - cy * ux;
    let disc = radius * radius - perp * perp;
    if disc < 0.0 {
        return None;
    }
    let half_chord = disc.sqrt();
    if along + half_chord < 0.0 {
        return None;
    }
    Some((along - half_chord).max(0.0))
}

/// Distance to the closest point of a disk lying inside a sector of
/// half-angle `half` around direction `heading`, if any part of it does.
pub fn sector_disk_entry(cx: f64, cy: f64, radius: f64, heading: f64, half: f64) -> Option<f64> {
    let dist = cx.hypot(cy);
    if dist <= radius {
        return Some(0.0);
    }
    if half > 0.0 {
        let bearing = wrap_angle(cy.atan2(cx) - heading);
        if half >= PI || bearing.abs() <= half {
            return Some(dist - radius);
        }
    }
    // The centre direction is outside the sector, so the nearest visible
    // point lies on one of the two boundary rays.
    [heading - half, heading + half]
        .into_iter()
        .filter_map(|dir| ray_disk_entry(cx, cy, radius, dir.cos(), dir.sin()))
        .min_by(f64::total_cmp)
}

fn nearest_state(world: &WorldState, observer: usize, entry: impl Fn(f64, f64, f64) -> Option<f64>) -> usize {
    let origin = world.bodies[observer].pose;
    let mut best: Option<(f64, usize)> = None;
    for (j, body) in world.bodies.iter().enumerate() {
        if j == observer {
            continue;
        }
        if let Some(t) = entry(body.pose.x - origin.x, body.pose.y - origin.y, body.radius) {
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, j));
            }
        }
    }
    best.map_or(0, |(_, j)| kind_code(world.bodies[j].kind, world.sensor_state_count))
}

/// Reads the forward ray sensor of `observer`: 0 for nothing, otherwise the
/// code of the nearest body the ray hits (range is unlimited).
///
/// With a binary sensor robots read 1 and objects 0; with a ternary sensor
/// objects read 1 and robots 2.
pub fn sense_line_of_sight(world: &WorldState, observer: usize) -> usize {
    let heading = world.bodies[observer].pose.heading;
    let (ux, uy) = (heading.cos(), heading.sin());
    nearest_state(world, observer, |cx, cy, r| ray_disk_entry(cx, cy, r, ux, uy))
}

/// Like [`sense_line_of_sight`] but a body registers when any part of it is
/// inside the sector of full angle `theta` centred on the heading.
pub fn sense_sector(world: &WorldState, observer: usize, theta: f64) -> usize {
    let heading = world.bodies[observer].pose.heading;
    let half = theta.clamp(0.0, TAU) / 2.0;
    nearest_state(world, observer, |cx, cy, r| sector_disk_entry(cx, cy, r, heading, half))
}

pub fn sense(world: &WorldState, observer: usize, sensor: Sensor) -> usize {
    match sensor {
        Sensor::LineOfSight => sense_line_of_sight(world, observer),
        Sensor::Sector(theta) => sense_sector(world, observer, theta),
    }
}

/// Anything that can drive a robot: picks a sensor and maps its state to a
/// wheel command in `[-1, 1]²`.
pub trait Brain {
    fn sensor(&self) -> Sensor;

    /// Clears internal memory, called once at trial start.
    fn reset(&mut self);

    fn command(&mut self, state: usize) -> (f64, f64);
}

/// Advances the world by one control cycle.
///
/// `brains[i]` drives robot `i`; all robots sense before any of them moves.
/// Returns the sensor state each robot read during this cycle.
pub fn step_trial<B: Brain>(world: &mut WorldState, config: &WorldConfig, brains: &mut [B]) -> Vec<usize> {
    let n_robots = world.n_robots();
    assert_eq!(brains.len(), n_robots, "one brain per robot");

    let states: Vec<usize> = (0..n_robots)
        .map(|i| sense(world, i, brains[i].sensor()))
        .collect();

    let (lo, hi) = config.wheel_noise_range;
    for (i, brain) in brains.iter_mut().enumerate() {
        let (left, right) = brain.command(states[i]);
        let (left, right) = (left.clamp(-1.0, 1.0), right.clamp(-1.0, 1.0));
        let (nl, nr) = if lo < hi {
            (world.rng.random_range(lo..hi), world.rng.random_range(lo..hi))
        } else {
            (lo, lo)
        };
        world.bodies[i].wheel_command = (left * nl, right * nr);
    }

    for body in &mut world.bodies {
        body.last_pose = body.pose;
    }
    for _ in 0..config.substeps() {
        physics_substep(world, config);
    }
    states
}

fn physics_substep(world: &mut WorldState, config: &WorldConfig) {
    let dt = config.physics_dt;
    for body in world.bodies.iter_mut() {
        if !body.kind.is_robot() {
            body.velocity = (0.0, 0.0);
            continue;
        }
        let (left, right) = body.wheel_command;
        let v = (left + right) / 2.0 * config.max_speed;
        let omega = (right - left) * config.max_speed / config.inter_wheel_distance;
        let Pose { x, y, heading } = body.pose;
        let turn = omega * dt;
        let (nx, ny) = if turn.abs() < 1e-12 {
            (x + v * dt * heading.cos(), y + v * dt * heading.sin())
        } else {
            let r = v / omega;
            (
                x + r * ((heading + turn).sin() - heading.sin()),
                y - r * ((heading + turn).cos() - heading.cos()),
            )
        };
        body.velocity = ((nx - x) / dt, (ny - y) / dt);
        body.pose = Pose::new(nx, ny, heading + turn);
    }
    resolve_contacts(&mut world.bodies, config.collision_sweeps);
    world.time += dt;
}

/// Fraction of a contact correction applied to `a` and to `b`.
fn correction_shares(a: &Body, b: &Body, nx: f64, ny: f64) -> (f64, f64) {
    match (a.kind.is_robot(), b.kind.is_robot()) {
        (true, false) => push_shares(a, b, nx, ny),
        (false, true) => {
            let (sb, sa) = push_shares(b, a, -nx, -ny);
            (sa, sb)
        }
        _ => (0.5, 0.5),
    }
}

/// A robot only displaces an object while it moves towards it; otherwise the
/// object holds still and the robot yields. `(nx, ny)` points from the robot
/// to the object.
fn push_shares(robot: &Body, object: &Body, nx: f64, ny: f64) -> (f64, f64) {
    let approach = robot.velocity.0 * nx + robot.velocity.1 * ny;
    if approach > 0.0 {
        let total = robot.mass + object.mass;
        (object.mass / total, robot.mass / total)
    } else {
        (1.0, 0.0)
    }
}

/// Projects overlapping disks apart, sweeping over all pairs until the worst
/// overlap seen in a sweep is within tolerance or `max_sweeps` is reached.
fn resolve_contacts(bodies: &mut [Body], max_sweeps: usize) {
    let n = bodies.len();
    for _ in 0..max_sweeps {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let reach = bodies[i].radius + bodies[j].radius;
                let dx = bodies[j].pose.x - bodies[i].pose.x;
                if dx.abs() >= reach {
                    continue;
                }
                let dy = bodies[j].pose.y - bodies[i].pose.y;
                if dy.abs() >= reach {
                    continue;
                }
                let d2 = dx * dx + dy * dy;
                if d2 >= reach * reach {
                    continue;
                }
                let d = d2.sqrt();
                let overlap = reach - d;
                worst = worst.max(overlap);
                let (nx, ny) = if d > 1e-12 { (dx / d, dy / d) } else { (1.0, 0.0) };
                let (share_i, share_j) = correction_shares(&bodies[i], &bodies[j], nx, ny);
                bodies[i].pose.x -= nx * overlap * share_i;
                bodies[i].pose.y -= ny * overlap * share_i;
                bodies[j].pose.x += nx * overlap * share_j;
                bodies[j].pose.y += ny * overlap * share_j;
            }
        }
        if worst < OVERLAP_TOLERANCE {
            break;
        }
    }
}

/// Converts a pose sequence sampled every `control_dt` into (linear,
/// angular) speed pairs.
///
/// Linear speed is the displacement over the step, positive when the motion
/// is within π/2 of the heading and negative otherwise.
pub fn extract_speeds(trajectory: &[Pose], control_dt: f64) -> Result<Vec<(f64, f64)>> {
    if trajectory.len() < 2 {
        return Err(Error::ShortTrajectory(trajectory.len()));
    }
    Ok(trajectory
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let turn = wrap_angle(b.heading - a.heading);
            let mid = a.heading + turn / 2.0;
            let dist = dx.hypot(dy);
            let forward = dx * mid.cos() + dy * mid.sin() > 0.0;
            let s = if forward { dist } else { -dist } / control_dt;
            (s, turn / control_dt)
        })
        .collect())
}

/// Poses and sensor readings of one finished trial.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub kinds: Vec<BodyKind>,
    /// `trajectories[body][step]`, one pose per control cycle boundary
    /// (`control_steps + 1` entries). Empty unless recording was requested.
    pub trajectories: Vec<Vec<Pose>>,
    /// `occupancy[robot][state]`: control cycles spent in each sensor state.
    pub occupancy: Vec<[u32; 3]>,
    pub final_state: WorldState,
}

impl TrialRecord {
    pub fn speeds(&self, body: usize, control_dt: f64) -> Result<Vec<(f64, f64)>> {
        extract_speeds(&self.trajectories[body], control_dt)
    }
}

/// Runs a whole trial from a fresh world.
pub fn run_trial<B: Brain>(
    config: &WorldConfig,
    rng: Stream,
    brains: &mut [B],
    record_trajectories: bool,
) -> Result<TrialRecord> {
    let mut world = initialize_world(config, rng)?;
    for brain in brains.iter_mut() {
        brain.reset();
    }
    let steps = config.control_steps();
    let mut trajectories: Vec<Vec<Pose>> = if record_trajectories {
        world
            .bodies
            .iter()
            .map(|b| {
                let mut t = Vec::with_capacity(steps + 1);
                t.push(b.pose);
                t
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut occupancy = vec![[0u32; 3]; world.n_robots()];
    for _ in 0..steps {
        let states = step_trial(&mut world, config, brains);
        for (count, state) in occupancy.iter_mut().zip(states) {
            count[state] += 1;
        }
        for (traj, body) in trajectories.iter_mut().zip(&world.bodies) {
            traj.push(body.pose);
        }
    }
    Ok(TrialRecord {
        kinds: world.bodies.iter().map(|b| b.kind).collect(),
        trajectories,
        occupancy,
        final_state: world,
    })
}

/// Formats like C's `%.9g`.
pub fn format_sig9(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let exponent = value.abs().log10().floor() as i32;
    let sci = format!("{value:.8e}");
    // Rounding can bump the exponent, so read it back from the formatted text.
    let exponent = sci
        .split_once('e')
        .and_then(|(_, e)| e.parse::<i32>().ok())
        .unwrap_or(exponent);
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let fixed = format!("{value:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let (mantissa, exp) = sci.split_once('e').unwrap();
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        let exp: i32 = exp.parse().unwrap();
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

pub const TRAJECTORY_HEADER: &str = "trial,step,body,kind,x,y,heading";

/// Appends a trial's recorded trajectories as CSV rows (no header).
pub fn write_trajectory_rows(out: &mut String, trial: usize, record: &TrialRecord) {
    let steps = record.trajectories.first().map_or(0, Vec::len);
    for step in 0..steps {
        for (body, traj) in record.trajectories.iter().enumerate() {
            let p = traj[step];
            let _ = writeln!(
                out,
                "{trial},{step},{body},{},{},{},{}",
                record.kinds[body].as_str(),
                format_sig9(p.x),
                format_sig9(p.y),
                format_sig9(p.heading)
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    struct Fixed(f64, f64);

    impl Brain for Fixed {
        fn sensor(&self) -> Sensor {
            Sensor::LineOfSight
        }
        fn reset(&mut self) {}
        fn command(&mut self, _state: usize) -> (f64, f64) {
            (self.0, self.1)
        }
    }

    fn noiseless(n_agents: usize) -> WorldConfig {
        WorldConfig {
            n_agents,
            n_replicas: 0,
            wheel_noise_range: (1.0, 1.0),
            ..WorldConfig::default()
        }
    }

    fn world_with(bodies: &[(BodyKind, f64, f64, f64)], sensor_state_count: usize) -> WorldState {
        let bodies = bodies
            .iter()
            .map(|&(kind, x, y, heading)| {
                let radius = if kind.is_robot() { 3.5 } else { 5.0 };
                Body::new(kind, Pose::new(x, y, heading), radius, 150.0)
            })
            .collect();
        WorldState {
            bodies,
            time: 0.0,
            sensor_state_count,
            rng: stream(0, &[]),
        }
    }

    #[test]
    fn wrap_angle_range() {
        for a in [-10.0, -PI, -1e-17, 0.0, PI, 3.5 * PI, 1e6] {
            let w = wrap_angle(a);
            assert!((-PI..PI).contains(&w), "{a} -> {w}");
            assert!(((w - a) / TAU - ((w - a) / TAU).round()).abs() < 1e-9);
        }
        assert_eq!(wrap_angle(PI), -PI);
    }

    #[test]
    fn aggregation_world_is_clear_and_inside_square() {
        let config = WorldConfig::aggregation();
        let world = initialize_world(&config, stream(1, &[])).unwrap();
        assert_eq!(world.bodies.len(), 11);
        assert_eq!(world.bodies.iter().filter(|b| b.kind == BodyKind::Replica).count(), 1);
        assert!(world.max_overlap() <= 0.0);
        let half = config.init_square_side / 2.0;
        for b in &world.bodies {
            assert!(b.pose.x.abs() + b.radius <= half + 1e-9);
            assert!(b.pose.y.abs() + b.radius <= half + 1e-9);
            assert!((-PI..PI).contains(&b.pose.heading));
        }
    }

    #[test]
    fn single_body_world() {
        let world = initialize_world(&noiseless(1), stream(5, &[])).unwrap();
        assert_eq!(world.bodies.len(), 1);
        assert!((-PI..PI).contains(&world.bodies[0].pose.heading));
    }

    #[test]
    fn initialization_is_deterministic() {
        let config = WorldConfig::clustering();
        let a = initialize_world(&config, stream(3, &[1])).unwrap();
        let b = initialize_world(&config, stream(3, &[1])).unwrap();
        assert_eq!(a.bodies, b.bodies);
    }

    #[test]
    fn over_dense_square_is_rejected() {
        let config = WorldConfig {
            n_agents: 50,
            init_square_side: 20.0,
            ..WorldConfig::default()
        };
        assert!(matches!(
            initialize_world(&config, stream(1, &[])),
            Err(Error::OverDense { .. })
        ));
    }

    #[test]
    fn control_dt_must_be_multiple_of_physics_dt() {
        let config = WorldConfig {
            physics_dt: 0.03,
            ..WorldConfig::default()
        };
        assert!(matches!(config.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn ray_sees_robot_ahead_not_beside() {
        let w = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Agent, 50.0, 0.0, 1.0)], 2);
        assert_eq!(sense_line_of_sight(&w, 0), 1);
        let w = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Agent, 0.0, 50.0, 1.0)], 2);
        assert_eq!(sense_line_of_sight(&w, 0), 0);
        let w = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Agent, -50.0, 0.0, 1.0)], 2);
        assert_eq!(sense_line_of_sight(&w, 0), 0, "bodies behind are invisible");
    }

    #[test]
    fn nearer_object_occludes_robot() {
        let w = world_with(
            &[
                (BodyKind::Agent, 0.0, 0.0, 0.0),
                (BodyKind::Agent, 40.0, 0.0, 0.0),
                (BodyKind::Object, 20.0, 0.0, 0.0),
            ],
            3,
        );
        assert_eq!(sense_line_of_sight(&w, 0), 1);
        let w = world_with(
            &[
                (BodyKind::Agent, 0.0, 0.0, 0.0),
                (BodyKind::Agent, 20.0, 0.0, 0.0),
                (BodyKind::Object, 40.0, 0.0, 0.0),
            ],
            3,
        );
        assert_eq!(sense_line_of_sight(&w, 0), 2);
    }

    #[test]
    fn sector_cases() {
        let w = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Agent, 0.0, 50.0, 0.0)], 2);
        assert_eq!(sense_sector(&w, 0, TAU), 1);
        assert_eq!(sense_sector(&w, 0, 0.0), 0);
        let w = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Agent, 50.0, 50.0, 0.0)], 2);
        assert_eq!(sense_sector(&w, 0, PI / 3.0), 0);
        assert_eq!(sense_sector(&w, 0, PI / 2.0), 1);
        assert_eq!(sense_sector(&w, 0, PI), 1);
    }

    #[test]
    fn straight_line_kinematics() {
        let config = noiseless(1);
        let mut world = initialize_world(&config, stream(2, &[])).unwrap();
        let start = world.bodies[0].pose;
        let mut brains = [Fixed(1.0, 1.0)];
        for _ in 0..10 {
            step_trial(&mut world, &config, &mut brains);
        }
        let end = world.bodies[0].pose;
        let moved = (end.x - start.x).hypot(end.y - start.y);
        assert!((moved - 12.8).abs() < 1e-9 * 12.8);
        assert!((end.heading - start.heading).abs() < 1e-12);
        let along = (end.x - start.x) * start.heading.cos() + (end.y - start.y) * start.heading.sin();
        assert!((along - 12.8).abs() < 1e-9);
        assert!((world.time - 1.0).abs() < 1e-9);
    }

    #[test]
    fn opposite_wheels_rotate_in_place() {
        let config = noiseless(1);
        let mut world = initialize_world(&config, stream(2, &[])).unwrap();
        let start = world.bodies[0].pose;
        let mut brains = [Fixed(-1.0, 1.0)];
        step_trial(&mut world, &config, &mut brains);
        let end = world.bodies[0].pose;
        assert_eq!((end.x, end.y), (start.x, start.y));
        let expected = 2.0 * 12.8 / 5.1 * 0.1;
        assert!((wrap_angle(end.heading - start.heading) - expected).abs() < 1e-12);
    }

    #[test]
    fn noise_multipliers_stay_in_range() {
        let config = WorldConfig {
            n_agents: 3,
            n_replicas: 0,
            ..WorldConfig::default()
        };
        let mut world = initialize_world(&config, stream(4, &[])).unwrap();
        let mut brains = [Fixed(1.0, 1.0), Fixed(1.0, 1.0), Fixed(1.0, 1.0)];
        for _ in 0..200 {
            step_trial(&mut world, &config, &mut brains);
            for b in &world.bodies {
                for m in [b.wheel_command.0, b.wheel_command.1] {
                    assert!((0.95..1.05).contains(&m), "{m}");
                }
            }
        }
    }

    #[test]
    fn head_on_robots_never_overlap() {
        let config = noiseless(2);
        let mut world = world_with(&[(BodyKind::Agent, -20.0, 0.0, 0.0), (BodyKind::Agent, 20.0, 0.0, PI)], 2);
        let mut brains = [Fixed(1.0, 1.0), Fixed(1.0, 1.0)];
        for _ in 0..50 {
            for _ in 0..config.substeps() {
                physics_substep(&mut world, &config);
                let d = (world.bodies[0].pose.x - world.bodies[1].pose.x).abs();
                assert!(d >= 7.0 - OVERLAP_TOLERANCE, "{d}");
            }
            brains.iter_mut().enumerate().for_each(|(i, b)| world.bodies[i].wheel_command = b.command(0));
        }
        let d = (world.bodies[0].pose.x - world.bodies[1].pose.x).abs();
        assert!((d - 7.0).abs() < 1e-6);
    }

    #[test]
    fn robot_pushes_object_but_object_does_not_push_back() {
        let config = noiseless(1);
        let mut world = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Object, 8.6, 0.0, 0.0)], 3);
        world.bodies[0].wheel_command = (1.0, 1.0);
        let object_start = world.bodies[1].pose.x;
        for _ in 0..100 {
            physics_substep(&mut world, &config);
        }
        assert!(world.bodies[1].pose.x > object_start + 5.0);
        assert!(world.max_overlap() < OVERLAP_TOLERANCE);

        // A robot backing away never drags or shoves the object.
        let mut world = world_with(&[(BodyKind::Agent, 0.0, 0.0, 0.0), (BodyKind::Object, 8.4, 0.0, 0.0)], 3);
        world.bodies[0].wheel_command = (-1.0, -1.0);
        physics_substep(&mut world, &config);
        assert_eq!(world.bodies[1].pose.x, 8.4);
    }

    #[test]
    fn speed_sign_follows_heading() {
        let forward: Vec<Pose> = (0..3).map(|k| Pose::new(1.28 * k as f64, 0.0, 0.0)).collect();
        let s = extract_speeds(&forward, 0.1).unwrap();
        assert_eq!(s.len(), 2);
        for (lin, ang) in s {
            assert!((lin - 12.8).abs() < 1e-9);
            assert_eq!(ang, 0.0);
        }
        let backward: Vec<Pose> = (0..3).map(|k| Pose::new(1.28 * k as f64, 0.0, PI)).collect();
        for (lin, _) in extract_speeds(&backward, 0.1).unwrap() {
            assert!((lin + 12.8).abs() < 1e-9);
        }
    }

    #[test]
    fn short_trajectory_is_rejected() {
        assert!(matches!(
            extract_speeds(&[Pose::new(0.0, 0.0, 0.0)], 0.1),
            Err(Error::ShortTrajectory(1))
        ));
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.5), "1.5");
        assert_eq!(format_sig9(-165.83), "-165.83");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(123456789.4), "123456789");
        assert_eq!(format_sig9(1.23456789e12), "1.23456789e+12");
        assert_eq!(format_sig9(3.0e-7), "3e-07");
        assert_eq!(format_sig9(9.9999999999), "10");
    }
}
