//! Mercury isotopes, their transition lines, and vapour densities.
//!
//! Line data lives in a plain-text table (`data/mercury_lines.dat`, bundled
//! into the binary) so that hyperfine positions and strengths can be swapped
//! without touching code. Abundances are the natural-abundance table and are
//! renormalised to sum to one.

use std::fmt;
use std::path::Path;

use crate::constants::{ATOMIC_MASS_UNIT, BOLTZMANN, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

const BUNDLED_LINES: &str = include_str!("../data/mercury_lines.dat");

/// Label of the SIT line in the data table.
pub const MAIN_LINE: &str = "3D3->3P2";
/// Label of the secondary bosonic line sharing the 6³P₂ lower level.
pub const GREEN_LINE: &str = "3S1->3P2";

/// Natural abundances in percent, as tabulated (sum 100.01).
pub const NATURAL_ABUNDANCE_PERCENT: [(u32, f64); 7] = [
    (196, 0.15),
    (198, 10.02),
    (200, 23.13),
    (202, 29.80),
    (204, 6.85),
    (199, 16.84),
    (201, 13.22),
];

/// Nuclear spin stored as twice its value so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NuclearSpin(u8);

impl NuclearSpin {
    pub const ZERO: NuclearSpin = NuclearSpin(0);

    pub fn from_twice(twice: u8) -> Self {
        NuclearSpin(twice)
    }

    pub fn twice(self) -> u8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_boson(self) -> bool {
        self.0 == 0
    }

    /// Spin of a stable mercury isotope.
    pub fn of_mercury(mass_number: u32) -> Option<Self> {
        match mass_number {
            196 | 198 | 200 | 202 | 204 => Some(NuclearSpin(0)),
            199 => Some(NuclearSpin(1)),
            201 => Some(NuclearSpin(3)),
            _ => None,
        }
    }
}

impl fmt::Display for NuclearSpin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSpec {
    pub label: String,
    /// Line centre minus carrier, rad/s.
    pub center_frequency_offset: f64,
    /// Natural decay rate γ₀, rad/s.
    pub natural_linewidth: f64,
    /// |d|² relative to the bosonic main line.
    pub relative_strength: f64,
}

impl TransitionSpec {
    /// Dipole ratio d/d_main. Scales both the Rabi frequency seen by the line
    /// and its contribution to the field source.
    pub fn amplitude_factor(&self) -> f64 {
        self.relative_strength.sqrt()
    }

    /// Vacuum wavelength of the line given the carrier wavelength.
    pub fn wavelength(&self, carrier_wavelength: f64) -> f64 {
        let omega0 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / carrier_wavelength;
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (omega0 + self.center_frequency_offset)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsotopeSpec {
    pub mass_number: u32,
    /// kg
    pub atomic_mass: f64,
    /// Fraction of the sample; normalised over the sample's isotope list.
    pub abundance: f64,
    pub nuclear_spin: NuclearSpin,
    pub transitions: Vec<TransitionSpec>,
}

impl IsotopeSpec {
    pub fn main_line(&self) -> Option<&TransitionSpec> {
        self.transitions.iter().find(|t| t.label == MAIN_LINE)
    }
}

/// Which isotopes populate the vapour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsotopeMode {
    /// A single isotope with abundance 1.
    Single(u32),
    All,
}

impl IsotopeMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(IsotopeMode::All),
            _ => {
                let n = s.strip_suffix("-only")?.parse().ok()?;
                NuclearSpin::of_mercury(n).map(|_| IsotopeMode::Single(n))
            }
        }
    }
}

impl fmt::Display for IsotopeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsotopeMode::Single(n) => write!(f, "{n}-only"),
            IsotopeMode::All => write!(f, "all"),
        }
    }
}

/// The seven stable isotopes with the bundled line table.
pub fn mercury_isotope_table() -> Result<Vec<IsotopeSpec>> {
    parse_isotope_table(BUNDLED_LINES)
}

/// The seven stable isotopes with lines read from `path`.
pub fn load_isotope_table(path: &Path) -> Result<Vec<IsotopeSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_isotope_table(&text)
}

pub fn parse_isotope_table(text: &str) -> Result<Vec<IsotopeSpec>> {
    let raw_sum: f64 = NATURAL_ABUNDANCE_PERCENT.iter().map(|(_, a)| a).sum();
    let mut table: Vec<IsotopeSpec> = NATURAL_ABUNDANCE_PERCENT
        .iter()
        .map(|&(mass_number, percent)| IsotopeSpec {
            mass_number,
            atomic_mass: f64::from(mass_number) * ATOMIC_MASS_UNIT,
            abundance: percent / raw_sum,
            nuclear_spin: NuclearSpin::of_mercury(mass_number).expect("tabulated isotope"),
            transitions: Vec::new(),
        })
        .collect();

    for (lineno, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let record = format!("line {}: {}", lineno + 1, content);
        let bad = |message: String| Error::Data {
            record: record.clone(),
            message,
        };
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 columns, found {}", fields.len())));
        }
        let mass_number: u32 = fields[0]
            .parse()
            .map_err(|_| bad(format!("isotope `{}` is not an integer", fields[0])))?;
        let number = |i: usize, name: &str| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("{name} `{}` is not a number", fields[i])))
        };
        let offset_ghz = number(2, "offset_GHz")?;
        let gamma_mhz = number(3, "gamma0_MHz")?;
        let strength = number(4, "rel_strength")?;
        if gamma_mhz <= 0.0 {
            return Err(bad("gamma0_MHz must be positive".into()));
        }
        if strength < 0.0 {
            return Err(bad("rel_strength must be non-negative".into()));
        }
        if fields[1].is_empty() {
            return Err(bad("empty transition label".into()));
        }
        let iso = table
            .iter_mut()
            .find(|i| i.mass_number == mass_number)
            .ok_or_else(|| bad(format!("unknown isotope {mass_number}")))?;
        let two_pi = 2.0 * std::f64::consts::PI;
        iso.transitions.push(TransitionSpec {
            label: fields[1].to_string(),
            center_frequency_offset: two_pi * offset_ghz * 1e9,
            natural_linewidth: two_pi * gamma_mhz * 1e6,
            relative_strength: strength,
        });
    }

    for iso in &table {
        let record = format!("isotope {}", iso.mass_number);
        if iso.transitions.is_empty() {
            return Err(Error::Data {
                record,
                message: "no transitions listed".into(),
            });
        }
        if iso.nuclear_spin.is_boson() {
            let mut labels: Vec<&str> = iso.transitions.iter().map(|t| t.label.as_str()).collect();
            labels.sort_unstable();
            if labels != [MAIN_LINE, GREEN_LINE] {
                return Err(Error::Data {
                    record,
                    message: format!(
                        "bosonic isotope must list exactly {MAIN_LINE} and {GREEN_LINE}"
                    ),
                });
            }
            let main = iso.main_line().expect("checked above");
            if (main.relative_strength - 1.0).abs() > 1e-12 {
                return Err(Error::Data {
                    record,
                    message: "bosonic main line must have rel_strength 1".into(),
                });
            }
        }
    }
    Ok(table)
}

/// Restrict a full table to the isotopes selected by `mode`, renormalising
/// abundances over the selection.
pub fn select_isotopes(table: &[IsotopeSpec], mode: IsotopeMode) -> Result<Vec<IsotopeSpec>> {
    let mut chosen: Vec<IsotopeSpec> = match mode {
        IsotopeMode::All => table.to_vec(),
        IsotopeMode::Single(n) => table
            .iter()
            .filter(|i| i.mass_number == n)
            .cloned()
            .collect(),
    };
    if chosen.is_empty() {
        return Err(Error::Argument(format!(
            "isotope mode {mode} selects nothing"
        )));
    }
    let sum: f64 = chosen.iter().map(|i| i.abundance).sum();
    for iso in &mut chosen {
        iso.abundance /= sum;
    }
    Ok(chosen)
}

/// Saturated vapour pressure of mercury, Pa, for 250 K ≤ T ≤ 320 K.
///
/// Two-parameter Clausius–Clapeyron law `exp(a - b/T)` through
/// (273 K, 0.272 Pa) and (293 K, 0.889 Pa).
pub fn vapor_pressure_hg(temperature: f64) -> Result<f64> {
    const T_MIN: f64 = 250.0;
    const T_MAX: f64 = 320.0;
    if !(T_MIN..=T_MAX).contains(&temperature) {
        return Err(Error::Range {
            quantity: "temperature",
            value: temperature,
            min: T_MIN,
            max: T_MAX,
        });
    }
    let (a, b) = vapor_pressure_coefficients();
    Ok((a - b / temperature).exp())
}

/// `(a, b)` of the vapour-pressure law, with `b` in kelvin.
pub fn vapor_pressure_coefficients() -> (f64, f64) {
    const T1: f64 = 273.0;
    const P1: f64 = 0.272;
    const T2: f64 = 293.0;
    const P2: f64 = 0.889;
    let b = (P2 / P1).ln() / (1.0 / T1 - 1.0 / T2);
    let a = P1.ln() + b / T1;
    (a, b)
}

/// Ideal-gas number density, m⁻³.
pub fn number_density(pressure: f64, temperature: f64) -> Result<f64> {
    if temperature <= 0.0 || !temperature.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if pressure < 0.0 || !pressure.is_finite() {
        return Err(Error::Domain(format!(
            "pressure must be non-negative, got {pressure}"
        )));
    }
    Ok(pressure / (BOLTZMANN * temperature))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GasSample {
    /// K
    pub temperature: f64,
    /// Pa
    pub pressure: f64,
    /// m⁻³
    pub total_density: f64,
    pub isotopes: Vec<IsotopeSpec>,
    /// m⁻³, aligned with `isotopes`
    pub per_isotope_density: Vec<f64>,
}

impl GasSample {
    /// Ideal-gas sample at `(temperature, pressure)`.
    pub fn new(temperature: f64, pressure: f64, isotopes: Vec<IsotopeSpec>) -> Result<Self> {
        let total = number_density(pressure, temperature)?;
        Self::with_total_density(temperature, pressure, total, isotopes)
    }

    /// Sample whose total density is set directly (e.g. from an atom-count override).
    pub fn with_total_density(
        temperature: f64,
        pressure: f64,
        total_density: f64,
        isotopes: Vec<IsotopeSpec>,
    ) -> Result<Self> {
        if isotopes.is_empty() {
            return Err(Error::Argument(
                "gas sample needs at least one isotope".into(),
            ));
        }
        if !(total_density >= 0.0) {
            return Err(Error::Domain(format!("total density {total_density} < 0")));
        }
        for iso in &isotopes {
            if !(0.0..=1.0).contains(&iso.abundance) {
                return Err(Error::Domain(format!(
                    "abundance {} of isotope {} outside [0, 1]",
                    iso.abundance, iso.mass_number
                )));
            }
        }
        let sum: f64 = isotopes.iter().map(|i| i.abundance).sum();
        if !(0.99..=1.01).contains(&sum) {
            return Err(Error::Domain(format!("abundances sum to {sum}, not 1")));
        }
        let mut sample = GasSample {
            temperature,
            pressure,
            total_density,
            isotopes,
            per_isotope_density: Vec::new(),
        };
        sample.per_isotope_density = isotope_densities(&sample);
        Ok(sample)
    }
}

/// `A_α ρ_tot` for every isotope in the sample.
pub fn isotope_densities(sample: &GasSample) -> Vec<f64> {
    sample
        .isotopes
        .iter()
        .map(|i| i.abundance * sample.total_density)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Vec<IsotopeSpec> {
        mercury_isotope_table().unwrap()
    }

    #[test]
    fn raw_abundances_match_table() {
        let raw: f64 = NATURAL_ABUNDANCE_PERCENT
            .iter()
            .map(|(_, a)| a / 100.0)
            .sum();
        assert!((raw - 1.0001).abs() < 1e-12);
        let a202 = NATURAL_ABUNDANCE_PERCENT
            .iter()
            .find(|(m, _)| *m == 202)
            .unwrap()
            .1;
        assert_eq!(a202 / 100.0, 0.2980);

        let t = table();
        assert_eq!(t.len(), 7);
        let sum: f64 = t.iter().map(|i| i.abundance).sum();
        assert!((sum - 1.0).abs() < 1e-15);
        let i202 = t.iter().find(|i| i.mass_number == 202).unwrap();
        assert!((i202.abundance - 0.2980 / 1.0001).abs() < 1e-15);
    }

    #[test]
    fn spins_and_line_sets() {
        for iso in table() {
            let expected = match iso.mass_number {
                199 => 1,
                201 => 3,
                _ => 0,
            };
            assert_eq!(iso.nuclear_spin.twice(), expected, "{}", iso.mass_number);
            if iso.nuclear_spin.is_boson() {
                assert_eq!(iso.transitions.len(), 2);
                assert_eq!(iso.main_line().unwrap().relative_strength, 1.0);
            } else {
                let s: f64 = iso.transitions.iter().map(|t| t.relative_strength).sum();
                assert!((s - 1.0).abs() < 1e-5, "{} sums to {s}", iso.mass_number);
            }
            assert!(iso.transitions.iter().all(|t| t.natural_linewidth > 0.0));
        }
        let t = table();
        assert_eq!(
            t.iter()
                .find(|i| i.mass_number == 199)
                .unwrap()
                .nuclear_spin
                .to_string(),
            "1/2"
        );
        assert_eq!(
            t.iter()
                .find(|i| i.mass_number == 201)
                .unwrap()
                .nuclear_spin
                .to_string(),
            "3/2"
        );
        assert!((t[3].atomic_mass - 202.0 * ATOMIC_MASS_UNIT).abs() < 1e-40);
    }

    #[test]
    fn green_line_wavelength() {
        let t = table();
        let green = t[3]
            .transitions
            .iter()
            .find(|t| t.label == GREEN_LINE)
            .unwrap();
        let lambda = green.wavelength(crate::constants::CARRIER_WAVELENGTH);
        assert!((lambda - 546.227e-9).abs() < 1e-12);
    }

    #[test]
    fn malformed_table_names_record() {
        let err = parse_isotope_table("202, 3D3->3P2, 0.0, abc, 1.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("line 1") && msg.contains("gamma0_MHz"),
            "{msg}"
        );

        let err = parse_isotope_table("999, x, 0, 1, 1\n").unwrap_err();
        assert!(err.to_string().contains("unknown isotope"));

        let err = parse_isotope_table("202, 3D3->3P2, 0.0, 20.0\n").unwrap_err();
        assert!(err.to_string().contains("5 columns"));

        // Lines missing entirely for most isotopes.
        let err = parse_isotope_table("202, 3D3->3P2, 0.0, 20.0, 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Data { .. }));
    }

    #[test]
    fn vapor_pressure_anchors() {
        assert!((vapor_pressure_hg(273.0).unwrap() - 0.272).abs() < 1e-12);
        assert!((vapor_pressure_hg(293.0).unwrap() - 0.889).abs() < 1e-12);
        let p303 = vapor_pressure_hg(303.0).unwrap();
        assert!((p303 - 1.57).abs() <= 0.15, "P(303 K) = {p303}");
        assert!(matches!(vapor_pressure_hg(200.0), Err(Error::Range { .. })));
        assert!(vapor_pressure_hg(321.0).is_err());
    }

    #[test]
    fn vapor_pressure_strictly_increasing() {
        let mut prev = vapor_pressure_hg(250.0).unwrap();
        for t in 251..=320 {
            let p = vapor_pressure_hg(f64::from(t)).unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn densities() {
        assert_eq!(number_density(0.0, 293.0).unwrap(), 0.0);
        let n273 = number_density(0.272, 273.0).unwrap();
        assert!((n273 / 7.22e19 - 1.0).abs() < 1e-3, "{n273}");
        let n293 = number_density(0.889, 293.0).unwrap();
        assert!((n293 / 2.20e20 - 1.0).abs() < 2e-3, "{n293}");
        assert!(number_density(1.0, 0.0).is_err());
        assert!(number_density(1.0, -3.0).is_err());
    }

    #[test]
    fn per_isotope_density() {
        let single = select_isotopes(&table(), IsotopeMode::Single(202)).unwrap();
        let s = GasSample::with_total_density(273.0, 0.272, 7.22e19, single).unwrap();
        assert_eq!(s.per_isotope_density, vec![7.22e19]);

        let unit = GasSample::with_total_density(273.0, 0.0, 1.0, table()).unwrap();
        for (d, iso) in unit.per_isotope_density.iter().zip(&unit.isotopes) {
            assert_eq!(*d, iso.abundance);
        }

        let full = GasSample::new(273.0, 0.272, table()).unwrap();
        let i = full
            .isotopes
            .iter()
            .position(|i| i.mass_number == 202)
            .unwrap();
        let expected = 0.2980 / 1.0001 * full.total_density;
        assert!((full.per_isotope_density[i] - expected).abs() / expected < 1e-14);
        assert!((full.per_isotope_density[i] / 2.15e19 - 1.0).abs() < 5e-3);
        let sum: f64 = full.per_isotope_density.iter().sum();
        assert!((sum - full.total_density).abs() / full.total_density < 1e-12);
    }

    #[test]
    fn isotope_mode_parsing() {
        assert_eq!(
            IsotopeMode::parse("202-only"),
            Some(IsotopeMode::Single(202))
        );
        assert_eq!(IsotopeMode::parse("all"), Some(IsotopeMode::All));
        assert_eq!(IsotopeMode::parse("203-only"), None);
        assert_eq!(IsotopeMode::Single(202).to_string(), "202-only");
    }
}
