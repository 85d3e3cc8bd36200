//! Minimal PNM reading and writing (P2, P3, P5, P6). Samples are scaled to
//! 8 bits on load; grey images are expanded to three equal channels.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RasterError {
    #[error("byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("image has zero width or height")]
    Empty,
    #[error("pixel buffer has {got} samples, expected {expected}")]
    Size { got: usize, expected: usize },
}

fn parse_err(offset: usize, message: impl Into<String>) -> RasterError {
    RasterError::Parse { offset, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB.
    pub pixels: Vec<[u8; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Image, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        if pixels.len() != width * height {
            return Err(RasterError::Size { got: pixels.len(), expected: width * height });
        }
        Ok(Image { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Result<Image, RasterError> {
        Image::new(width, height, vec![color; width * height])
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        self.pixels[y * self.width + x] = c;
    }

    pub fn is_grey(&self) -> bool {
        self.pixels.iter().all(|p| p[0] == p[1] && p[1] == p[2])
    }

    pub fn parse(bytes: &[u8]) -> Result<Image, RasterError> {
        let mut r = Reader { bytes, pos: 0 };
        if bytes.len() < 2 || bytes[0] != b'P' {
            return Err(parse_err(0, "missing PNM magic"));
        }
        let kind = bytes[1];
        if !matches!(kind, b'2' | b'3' | b'5' | b'6') {
            return Err(parse_err(1, format!("unsupported format P{}", kind as char)));
        }
        r.pos = 2;
        let width = r.number()?;
        let height = r.number()?;
        r.skip_space();
        let at = r.pos;
        let maxval = r.number()?;
        if !(1..=65535).contains(&maxval) {
            return Err(parse_err(at, format!("maxval {maxval} out of range")));
        }
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        let channels = if matches!(kind, b'3' | b'6') { 3 } else { 1 };
        let count = width * height * channels;
        let mut samples = Vec::with_capacity(count);
        if matches!(kind, b'2' | b'3') {
            for _ in 0..count {
                r.skip_space();
                let at = r.pos;
                let s = r.number()?;
                if s > maxval {
                    return Err(parse_err(at, format!("sample {s} exceeds maxval {maxval}")));
                }
                samples.push(s);
            }
        } else {
            // exactly one whitespace byte after maxval
            let start = r.pos + 1;
            let wide = maxval > 255;
            let need = count * if wide { 2 } else { 1 };
            if bytes.len() < start + need {
                return Err(parse_err(bytes.len(), format!("truncated raster, expected {need} bytes")));
            }
            let data = &bytes[start..start + need];
            for i in 0..count {
                let s =
                    if wide { u16::from_be_bytes([data[2 * i], data[2 * i + 1]]) as usize } else { data[i] as usize };
                if s > maxval {
                    return Err(parse_err(start + i, format!("sample {s} exceeds maxval {maxval}")));
                }
                samples.push(s);
            }
        }
        let scale = |s: usize| ((s * 255 + maxval / 2) / maxval) as u8;
        let pixels = samples
            .chunks(channels)
            .map(|c| if channels == 1 { [scale(c[0]); 3] } else { [scale(c[0]), scale(c[1]), scale(c[2])] })
            .collect();
        Image::new(width, height, pixels)
    }

    /// Binary PGM if every pixel is grey, binary PPM otherwise.
    pub fn to_pnm(&self) -> Vec<u8> {
        if self.is_grey() {
            let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
            out.extend(self.pixels.iter().map(|p| p[0]));
            out
        } else {
            let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
            out.extend(self.pixels.iter().flatten());
            out
        }
    }

    /// Plain-text PPM, handy for fixtures.
    pub fn to_plain_ppm(&self) -> String {
        let mut s = format!("P3\n{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|p| format!("{} {} {}", p[0], p[1], p[2])).collect();
            let _ = writeln!(s, "{}", line.join("  "));
        }
        s
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self) -> Result<usize, RasterError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if start >= self.bytes.len() {
                parse_err(start, "unexpected end of file")
            } else {
                parse_err(start, format!("expected a number, found {:?}", self.bytes[start] as char))
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| parse_err(start, "number too large"))
    }
}
