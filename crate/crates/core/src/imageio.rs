//! Portable bitmap input, portable graymap output, and the mapping between
//! image pixels and lattice points of the central cell.
//!
//! Pixel `(r, c)` corresponds to `i = c` and `j = LN/2 - N/2 + (N - 1 - r)`,
//! so row 0 is the top of the cell (largest `y`).

use std::fmt::Write as _;

use crate::error::{domain, Error, Result};
use crate::lattice::{LatticePoint, PhaseSpaceConfig, PhaseSpaceDensity};

/// Square black-and-white image with power-of-two side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    size: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(size: usize) -> Result<Self> {
        if !size.is_power_of_two() {
            return domain(format!("image side {size} is not a power of two"));
        }
        Ok(Self { size, bits: vec![false; size * size] })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.size + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn fill_fraction(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    /// Parses a P1 (ASCII) or P4 (packed) portable bitmap.
    pub fn from_pbm(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.token()?;
        let binary = match magic {
            b"P1" => false,
            b"P4" => true,
            _ => return Err(cur.error(0, "expected P1 or P4 magic")),
        };
        let width_at = cur.skip_space();
        let width = cur.number()?;
        let height_at = cur.skip_space();
        let height = cur.number()?;
        if width != height {
            return Err(cur.error(height_at, format!("image is {width}x{height}, must be square")));
        }
        if !width.is_power_of_two() {
            return Err(cur.error(width_at, format!("side {width} is not a power of two")));
        }
        let mut img = Self { size: width, bits: vec![false; width * width] };
        if binary {
            // exactly one whitespace byte separates the header from the raster
            if !cur.peek().is_some_and(|b| b.is_ascii_whitespace()) {
                return Err(cur.error(cur.pos, "missing whitespace before raster"));
            }
            cur.pos += 1;
            let row_bytes = width.div_ceil(8);
            let raster = &bytes[cur.pos..];
            if raster.len() < row_bytes * width {
                return Err(cur.error(bytes.len(), format!("raster needs {} bytes, found {}", row_bytes * width, raster.len())));
            }
            for r in 0..width {
                for c in 0..width {
                    img.bits[r * width + c] = raster[r * row_bytes + c / 8] >> (7 - c % 8) & 1 == 1;
                }
            }
        } else {
            for k in 0..width * width {
                let at = cur.skip_space();
                img.bits[k] = match cur.peek() {
                    Some(b'0') => false,
                    Some(b'1') => true,
                    Some(_) => return Err(cur.error(at, "expected 0 or 1")),
                    None => return Err(cur.error(at, format!("raster ends after {k} pixels"))),
                };
                cur.pos += 1;
            }
        }
        Ok(img)
    }

    pub fn to_pbm_ascii(&self) -> Vec<u8> {
        let mut out = format!("P1\n{} {}\n", self.size, self.size);
        for row in self.bits.chunks_exact(self.size) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out.into_bytes()
    }

    pub fn to_pbm_binary(&self) -> Vec<u8> {
        let mut out = format!("P4\n{} {}\n", self.size, self.size).into_bytes();
        let row_bytes = self.size.div_ceil(8);
        for row in self.bits.chunks_exact(self.size) {
            let mut packed = vec![0u8; row_bytes];
            for (c, &b) in row.iter().enumerate() {
                packed[c / 8] |= (b as u8) << (7 - c % 8);
            }
            out.extend_from_slice(&packed);
        }
        out
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse { offset, message: message.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments; returns the new position.
    fn skip_space(&mut self) -> usize {
        while let Some(b) = self.peek() {
            if b == b'#' {
                while self.peek().is_some_and(|b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.pos
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        let start = self.skip_space();
        while self.peek().is_some_and(|b| !b.is_ascii_whitespace() && b != b'#') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(start, "unexpected end of header"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.skip_space();
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&v| v > 0 && v <= 1 << 15)
            .ok_or_else(|| self.error(start, "expected a positive image dimension"))
    }
}

/// 8-bit grayscale image; `max_density` is the value rendered as 255.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityImage {
    pub width: usize,
    pub height: usize,
    pub levels: Vec<u8>,
    pub max_density: f64,
}

impl DensityImage {
    pub fn level(&self, row: usize, col: usize) -> u8 {
        self.levels[row * self.width + col]
    }

    pub fn to_pgm_ascii(&self) -> Vec<u8> {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.levels.chunks_exact(self.width) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out.into_bytes()
    }

    pub fn to_pgm_binary(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.levels);
        out
    }
}

/// Axis-aligned block of lattice points, `i0..i1` by `j0..j1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl Region {
    pub fn full(cfg: PhaseSpaceConfig) -> Self {
        Self { i0: 0, i1: cfg.n(), j0: 0, j1: cfg.ln() }
    }

    /// The unit cell `offset` cells above the central one.
    pub fn cell(cfg: PhaseSpaceConfig, offset: isize) -> Result<Self> {
        let (n, ln) = (cfg.n() as isize, cfg.ln() as isize);
        let j0 = ln / 2 - n / 2 + offset * n;
        if j0 < 0 || j0 + n > ln {
            return domain(format!("cell offset {offset} lies outside the torus"));
        }
        Ok(Self { i0: 0, i1: cfg.n(), j0: j0 as usize, j1: (j0 + n) as usize })
    }

    pub fn central(cfg: PhaseSpaceConfig) -> Self {
        Self::cell(cfg, 0).expect("central cell exists")
    }
}

/// Side-by-side concatenation of equally tall images.
pub fn hstack(images: &[DensityImage]) -> Result<DensityImage> {
    let Some(first) = images.first() else { return domain("nothing to stack") };
    if images.iter().any(|im| im.height != first.height) {
        return domain("stacked images must share a height");
    }
    let width = images.iter().map(|im| im.width).sum();
    let mut levels = Vec::with_capacity(width * first.height);
    for r in 0..first.height {
        for im in images {
            levels.extend_from_slice(&im.levels[r * im.width..(r + 1) * im.width]);
        }
    }
    let max_density = images.iter().map(|im| im.max_density).fold(0.0, f64::max);
    Ok(DensityImage { width, height: first.height, levels, max_density })
}

/// Renders `density` over `region` with `gray = round(255·(p/max)^(1/gamma))`.
/// The top row is the largest `j`.
pub fn density_to_image(density: &PhaseSpaceDensity, region: Region, gamma: f64) -> Result<DensityImage> {
    let cfg = density.config();
    if region.i0 >= region.i1 || region.j0 >= region.j1 {
        return domain("empty region");
    }
    if region.i1 > cfg.n() || region.j1 > cfg.ln() {
        return domain("region exceeds the lattice");
    }
    if !(gamma > 0.0) {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    let (width, height) = (region.i1 - region.i0, region.j1 - region.j0);
    let at = |r: usize, c: usize| density.get(LatticePoint::new(region.i0 + c, region.j1 - 1 - r));
    let max = (0..height).flat_map(|r| (0..width).map(move |c| (r, c))).map(|(r, c)| at(r, c)).fold(0.0, f64::max);
    let mut levels = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let v = at(r, c);
            let scaled = if max > 0.0 && v > 0.0 { (v / max).powf(1.0 / gamma) } else { 0.0 };
            levels.push((255.0 * scaled).round().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(DensityImage { width, height, levels, max_density: max })
}

fn check_size(img: &BinaryImage, cfg: PhaseSpaceConfig) -> Result<()> {
    if img.size() != cfg.n() {
        return domain(format!("image side {} does not match N = {}", img.size(), cfg.n()));
    }
    Ok(())
}

fn pixel_point(cfg: PhaseSpaceConfig, row: usize, col: usize) -> LatticePoint {
    let n = cfg.n();
    LatticePoint::new(col, cfg.ln() / 2 - n / 2 + n - 1 - row)
}

/// Lattice points of the set pixels, in row-major pixel order.
pub fn image_to_points(img: &BinaryImage, cfg: PhaseSpaceConfig) -> Result<Vec<LatticePoint>> {
    check_size(img, cfg)?;
    let n = img.size();
    Ok((0..n * n).filter(|&k| img.bits[k]).map(|k| pixel_point(cfg, k / n, k % n)).collect())
}

pub fn points_to_image(points: &[LatticePoint], cfg: PhaseSpaceConfig) -> Result<BinaryImage> {
    let mut img = BinaryImage::new(cfg.n())?;
    let cell = Region::central(cfg);
    for p in points {
        if p.i >= cfg.n() || p.j < cell.j0 || p.j >= cell.j1 {
            return domain(format!("point ({}, {}) lies outside the central cell", p.i, p.j));
        }
        img.set(cell.j1 - 1 - p.j, p.i, true);
    }
    Ok(img)
}

/// Probability mass of `density` on the set pixels of `initial`.
pub fn recovery_overlap(initial: &BinaryImage, density: &PhaseSpaceDensity) -> Result<f64> {
    let cfg = density.config();
    let pts = image_to_points(initial, cfg)?;
    let mass: f64 = pts.iter().map(|&p| density.get(p)).sum();
    Ok(mass.clamp(0.0, 1.0))
}

/// Procedural horned head: an elliptic face with two horns, eye and mouth
/// cut-outs and a pointed beard. Uses only exactly rounded arithmetic, so the
/// raster is identical on every platform.
pub fn generate_demon_image(size: usize) -> Result<BinaryImage> {
    if size < 16 {
        return domain(format!("demon image needs N >= 16, got {size}"));
    }
    let mut img = BinaryImage::new(size)?;
    let n = size as f64;
    for r in 0..size {
        for c in 0..size {
            // pixel centre in [-1, 1]², v pointing up
            let u = (2.0 * c as f64 + 1.0) / n - 1.0;
            let v = 1.0 - (2.0 * r as f64 + 1.0) / n;
            img.set(r, c, demon_pixel(u, v));
        }
    }
    Ok(img)
}

fn demon_pixel(u: f64, v: f64) -> bool {
    let au = u.abs();
    let ellipse = |cu: f64, cv: f64, ru: f64, rv: f64| {
        let (a, b) = ((u - cu) / ru, (v - cv) / rv);
        a * a + b * b <= 1.0
    };
    let face = ellipse(0.0, -0.1, 0.36, 0.32);
    let horn = in_triangle((au, v), (0.14, 0.16), (0.32, 0.02), (0.52, 0.78));
    let beard = in_triangle((u, v), (-0.12, -0.34), (0.12, -0.34), (0.0, -0.66));
    let eye = ellipse(0.14, 0.0, 0.08, 0.06) || ellipse(-0.14, 0.0, 0.08, 0.06);
    let mouth = au <= 0.16 && (-0.26..=-0.2).contains(&v);
    (face || horn || beard) && !eye && !mouth
}

fn in_triangle(p: (f64, f64), a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    let side = |s: (f64, f64), e: (f64, f64)| (e.0 - s.0) * (p.1 - s.1) - (e.1 - s.1) * (p.0 - s.0);
    let (d1, d2, d3) = (side(a, b), side(b, c), side(c, a));
    (d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0 && d3 <= 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Set-pixel count of the procedural demon at N = 64.
    const DEMON_64_COUNT: usize = 492;

    fn cfg(n_q: u32, n_qp: u32) -> PhaseSpaceConfig {
        PhaseSpaceConfig::new(n_q, n_qp).unwrap()
    }

    fn diagonal() -> BinaryImage {
        let mut img = BinaryImage::new(2).unwrap();
        img.set(0, 0, true);
        img.set(1, 1, true);
        img
    }

    #[test]
    fn parses_ascii_and_binary_bitmaps() {
        assert_eq!(BinaryImage::from_pbm(b"P1\n2 2\n1 0 0 1\n").unwrap(), diagonal());
        assert_eq!(BinaryImage::from_pbm(b"P4\n2 2\n\x80\x40").unwrap(), diagonal());
        assert_eq!(BinaryImage::from_pbm(b"P1 # c\n2 # d\n 2\n1001").unwrap(), diagonal());
        let img = generate_demon_image(32).unwrap();
        assert_eq!(BinaryImage::from_pbm(&img.to_pbm_ascii()).unwrap(), img);
        assert_eq!(BinaryImage::from_pbm(&img.to_pbm_binary()).unwrap(), img);
    }

    #[test]
    fn rejects_malformed_bitmaps_with_offsets() {
        let off = |bytes: &[u8]| match BinaryImage::from_pbm(bytes) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(off(b"P1\n3 2\n1 0 0\n1 0 0\n"), 5);
        assert_eq!(off(b"P1\n3 3\n1 0 0 1 0 0 1 0 0\n"), 3);
        assert_eq!(off(b"P2\n2 2\n"), 0);
        assert_eq!(off(b"P1\n2 2\n1 0 2 1\n"), 11);
        assert_eq!(off(b"P1\n2 2\n1 0\n"), 11);
        assert_eq!(off(b"P4\n2 2\n\x80"), 8);
        assert_eq!(off(b"P1\nx 2\n"), 3);
        assert_eq!(off(b""), 0);
    }

    #[test]
    fn writers_produce_expected_bytes() {
        assert_eq!(diagonal().to_pbm_ascii(), b"P1\n2 2\n1 0\n0 1\n");
        assert_eq!(diagonal().to_pbm_binary(), b"P4\n2 2\n\x80\x40");
        let im = DensityImage { width: 2, height: 1, levels: vec![0, 255], max_density: 0.5 };
        assert_eq!(im.to_pgm_ascii(), b"P2\n2 1\n255\n0 255\n");
        assert_eq!(im.to_pgm_binary(), b"P5\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn pixel_mapping_examples() {
        let c = cfg(2, 4);
        let mut full = BinaryImage::new(4).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                full.set(r, col, true);
            }
        }
        let pts = image_to_points(&full, c).unwrap();
        assert_eq!(pts.len(), 16);
        for p in &pts {
            let q = c.to_continuous(*p);
            assert!((-0.5..0.5).contains(&q.x) && (-0.5..0.5).contains(&q.y), "{q:?}");
        }
        let mut corner = BinaryImage::new(4).unwrap();
        corner.set(3, 0, true);
        assert_eq!(image_to_points(&corner, c).unwrap(), vec![LatticePoint::new(0, 16 / 2 - 2)]);
        assert!(image_to_points(&corner, cfg(3, 4)).is_err());
    }

    #[test]
    fn demon_image_properties() {
        assert!(generate_demon_image(8).is_err());
        for n in [16, 32, 64, 128, 256] {
            let a = generate_demon_image(n).unwrap();
            assert_eq!(a, generate_demon_image(n).unwrap());
            let f = a.fill_fraction();
            assert!((0.05..=0.30).contains(&f), "N={n} fill {f}");
        }
        let img = generate_demon_image(32).unwrap();
        assert_eq!(image_to_points(&img, cfg(5, 8)).unwrap().len(), img.count());
        assert_eq!(generate_demon_image(64).unwrap().count(), DEMON_64_COUNT);
    }

    #[test]
    fn density_rendering() {
        let c = cfg(2, 3);
        let mut p = vec![0.0; c.lattice_size()];
        let target = LatticePoint::new(1, 4);
        p[c.flat_index(target)] = 1.0;
        let d = PhaseSpaceDensity::new(c, p).unwrap();
        let im = density_to_image(&d, Region::central(c), 1.0).unwrap();
        assert_eq!((im.width, im.height), (4, 4));
        // j = 4 is the second row from the top of the cell j ∈ [2, 6)
        for r in 0..4 {
            for col in 0..4 {
                assert_eq!(im.level(r, col), if (r, col) == (1, 1) { 255 } else { 0 });
            }
        }
        let uniform = PhaseSpaceDensity::new(c, vec![1.0 / 32.0; 32]).unwrap();
        let im = density_to_image(&uniform, Region::full(c), 1.0).unwrap();
        assert!(im.levels.iter().all(|&l| l == 255));
        assert!(density_to_image(&uniform, Region { i0: 1, i1: 1, j0: 0, j1: 2 }, 1.0).is_err());
        assert!(Region::cell(c, 1).is_err());
        assert_eq!(Region::cell(cfg(2, 4), 1).unwrap().j0, 10);
    }

    #[test]
    fn image_round_trip_through_density() {
        let c = cfg(5, 8);
        let img = generate_demon_image(32).unwrap();
        let pts = image_to_points(&img, c).unwrap();
        assert_eq!(points_to_image(&pts, c).unwrap(), img);
        let mut p = vec![0.0; c.lattice_size()];
        for q in &pts {
            p[c.flat_index(*q)] = 1.0 / pts.len() as f64;
        }
        let d = PhaseSpaceDensity::new(c, p).unwrap();
        let im = density_to_image(&d, Region::central(c), 1.0).unwrap();
        for r in 0..32 {
            for col in 0..32 {
                assert_eq!(im.level(r, col) == 255, img.get(r, col));
                assert!(im.level(r, col) == 255 || im.level(r, col) == 0);
            }
        }
        assert!((recovery_overlap(&img, &d).unwrap() - 1.0).abs() < 1e-12);
        let uniform = PhaseSpaceDensity::new(c, vec![1.0 / c.lattice_size() as f64; c.lattice_size()]).unwrap();
        let want = img.fill_fraction() / c.l() as f64;
        assert!((recovery_overlap(&img, &uniform).unwrap() - want).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn random_images_round_trip(bits in proptest::collection::vec(any::<bool>(), 64)) {
            let c = cfg(3, 5);
            let mut img = BinaryImage::new(8).unwrap();
            for (k, b) in bits.iter().enumerate() {
                img.set(k / 8, k % 8, *b);
            }
            prop_assert_eq!(BinaryImage::from_pbm(&img.to_pbm_binary()).unwrap(), img.clone());
            prop_assert_eq!(BinaryImage::from_pbm(&img.to_pbm_ascii()).unwrap(), img.clone());
            let pts = image_to_points(&img, c).unwrap();
            prop_assert_eq!(points_to_image(&pts, c).unwrap(), img);
        }

        #[test]
        fn overlap_drops_when_mass_leaves_support(frac in 0.0f64..1.0) {
            let c = cfg(4, 6);
            let img = generate_demon_image(16).unwrap();
            let pts = image_to_points(&img, c).unwrap();
            let outside = LatticePoint::new(0, 0);
            let mut p = vec![0.0; c.lattice_size()];
            for q in &pts {
                p[c.flat_index(*q)] = (1.0 - frac) / pts.len() as f64;
            }
            p[c.flat_index(outside)] += frac;
            let d = PhaseSpaceDensity::new(c, p).unwrap();
            prop_assert!((recovery_overlap(&img, &d).unwrap() - (1.0 - frac)).abs() < 1e-12);
        }
    }
}
