//! Binary Netpbm carriers: P6 for RGB rasters, P5 for label maps.
//!
//! Only the canonical subset is accepted: maxval 255, no header comments,
//! exactly one whitespace byte between the maxval and the payload, and no
//! bytes after the payload.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl RasterImage {
    /// `pixels` is row-major RGB, three bytes per pixel.
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::argument(format!(
                "raster dimensions must be positive, got {height}x{width}"
            )));
        }
        if pixels.len() != height * width * 3 {
            return Err(Error::argument(format!(
                "expected {} RGB bytes for {height}x{width}, got {}",
                height * width * 3,
                pixels.len()
            )));
        }
        Ok(RasterImage {
            height,
            width,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn rgb_pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.pixels.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }
}

pub const IGNORE_LABEL: u8 = 255;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    height: usize,
    width: usize,
    labels: Vec<u8>,
    num_classes: usize,
}

impl LabelMap {
    pub fn new(height: usize, width: usize, labels: Vec<u8>, num_classes: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::argument(format!(
                "label map dimensions must be positive, got {height}x{width}"
            )));
        }
        if labels.len() != height * width {
            return Err(Error::argument(format!(
                "expected {} labels for {height}x{width}, got {}",
                height * width,
                labels.len()
            )));
        }
        if num_classes == 0 || num_classes > IGNORE_LABEL as usize {
            return Err(Error::argument(format!(
                "num_classes must be in 1..=255, got {num_classes}"
            )));
        }
        if let Some(pos) = labels
            .iter()
            .position(|&l| l != IGNORE_LABEL && l as usize >= num_classes)
        {
            return Err(Error::Data(format!(
                "class id {} at row {}, col {} is outside 0..{num_classes}",
                labels[pos],
                pos / width,
                pos % width
            )));
        }
        Ok(LabelMap {
            height,
            width,
            labels,
            num_classes,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Row-major class ids; `IGNORE_LABEL` marks unlabeled pixels.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.labels[row * self.width + col]
    }
}

struct Header {
    width: usize,
    height: usize,
    data_offset: usize,
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace(&mut self) -> Result<()> {
        let start = self.pos;
        while self.pos < self.data.len() && is_space(self.data[self.pos]) {
            self.pos += 1;
        }
        if self.pos < self.data.len() && self.data[self.pos] == b'#' {
            return Err(Error::format(self.pos, "header comments are not supported"));
        }
        if self.pos == start {
            return Err(Error::format(self.pos, "expected whitespace"));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        let mut value: usize = 0;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((self.data[self.pos] - b'0') as usize))
                .ok_or_else(|| Error::format(start, format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format(start, format!("expected {what}")));
        }
        Ok(value)
    }
}

fn parse_header(data: &[u8], magic: &[u8; 2]) -> Result<Header> {
    if data.len() < 2 || &data[..2] != magic {
        return Err(Error::format(
            0,
            format!("expected magic {}", String::from_utf8_lossy(magic)),
        ));
    }
    let mut cur = Cursor { data, pos: 2 };
    cur.skip_whitespace()?;
    let width = cur.number("width")?;
    cur.skip_whitespace()?;
    let height = cur.number("height")?;
    cur.skip_whitespace()?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::format(
            maxval_at,
            format!("maxval must be 255, got {maxval}"),
        ));
    }
    match data.get(cur.pos) {
        Some(&b) if is_space(b) => {}
        _ => {
            return Err(Error::format(
                cur.pos,
                "expected one whitespace byte before payload",
            ))
        }
    }
    if width == 0 || height == 0 {
        return Err(Error::format(2, format!("zero dimension {width}x{height}")));
    }
    Ok(Header {
        width,
        height,
        data_offset: cur.pos + 1,
    })
}

fn payload<'a>(data: &'a [u8], header: &Header, bytes_per_pixel: usize) -> Result<&'a [u8]> {
    let expected = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(bytes_per_pixel))
        .ok_or_else(|| Error::format(2, "dimensions overflow"))?;
    let body = &data[header.data_offset..];
    if body.len() < expected {
        return Err(Error::format(
            data.len(),
            format!(
                "truncated payload: expected {expected} bytes, found {}",
                body.len()
            ),
        ));
    }
    if body.len() > expected {
        return Err(Error::format(
            header.data_offset + expected,
            format!("{} trailing bytes after payload", body.len() - expected),
        ));
    }
    Ok(body)
}

pub fn decode_image(data: &[u8]) -> Result<RasterImage> {
    let header = parse_header(data, b"P6")?;
    let body = payload(data, &header, 3)?;
    RasterImage::new(header.height, header.width, body.to_vec())
}

pub fn encode_image(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn decode_labelmap(data: &[u8], num_classes: usize) -> Result<LabelMap> {
    let header = parse_header(data, b"P5")?;
    let body = payload(data, &header, 1)?;
    LabelMap::new(header.height, header.width, body.to_vec(), num_classes)
}

pub fn encode_labelmap(map: &LabelMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", map.width, map.height).into_bytes();
    out.extend_from_slice(&map.labels);
    out
}
