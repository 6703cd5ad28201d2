//! Grayscale raster type, PGM/PNG codecs and index utilities.
//!
//! Pixels are stored row-major as `f64`. Integer files are normalized to
//! `[0, 1]` on load by dividing by the file's maximum sample value, and
//! quantized back with round-half-away-from-zero on save.

use std::io::Cursor;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("image dimensions must be non-zero (got {width}x{height})")]
    Empty { width: usize, height: usize },
    #[error("data length {len} does not match {width}x{height}")]
    LengthMismatch {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("non-finite pixel value at index {index}")]
    NonFinite { index: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("multi-channel input is not supported ({0})")]
    MultiChannel(String),
    #[error("truncated payload: {0}")]
    Truncated(String),
    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(u32),
    #[error("unknown image format for {0:?}")]
    UnknownFormat(String),
    #[error("png encoding failed: {0}")]
    Encode(String),
}

/// Real-valued grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::Empty { width, height });
        }
        if data.len() != width * height {
            return Err(ImageError::LengthMismatch {
                width,
                height,
                len: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(ImageError::NonFinite { index });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from `f(row, col)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image from its columns, each of length `height`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, ImageError> {
        let width = columns.len();
        let height = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != height) {
            return Err(ImageError::LengthMismatch {
                width,
                height,
                len: bad.len(),
            });
        }
        Self::from_fn(width, height, |row, col| columns[col][row])
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.height).map(|row| self.get(row, col)).collect()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Applies `f` to every pixel. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, ImageError> {
        Self::new(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// `out(r, c) = in(c, r)`.
    pub fn transpose(&self) -> Image {
        let (w, h) = (self.width, self.height);
        let mut data = vec![0.0; w * h];
        for row in 0..h {
            for col in 0..w {
                data[col * h + row] = self.data[row * w + col];
            }
        }
        Image {
            width: h,
            height: w,
            data,
        }
    }
}

/// Direction along which stripes run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Vertical stripes; each column is equalized against its neighbors.
    #[default]
    Columns,
    /// Horizontal stripes; handled as columns of the transposed image.
    Lines,
}

impl std::str::FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "columns" => Ok(Orientation::Columns),
            "lines" => Ok(Orientation::Lines),
            other => Err(format!(
                "unknown orientation {other:?} (expected columns|lines)"
            )),
        }
    }
}

/// Whole-sample mirror of `index` into `0..len`: the edge sample is not repeated.
///
/// For `len = 4`, indices `-2..=5` map to `2, 1, 0, 1, 2, 3, 2, 1`.
/// `len = 1` maps everything to 0.
pub fn reflect_index(index: isize, len: usize) -> usize {
    assert!(len >= 1, "reflect_index needs a non-empty range");
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let folded = index.rem_euclid(period);
    if folded < len as isize {
        folded as usize
    } else {
        (period - folded) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    /// Picks the format from a file extension (`.pgm` or `.png`, case-insensitive).
    pub fn from_path(path: &Path) -> Result<Self, ImageError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(ImageError::UnknownFormat(path.display().to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn from_bits(bits: u32) -> Result<Self, ImageError> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(ImageError::UnsupportedBitDepth(other)),
        }
    }

    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

/// A decoded file: the normalized image and the sample depth it was stored with.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub image: Image,
    pub bit_depth: BitDepth,
}

pub fn load_image(bytes: &[u8], format: ImageFormat) -> Result<Decoded, ImageError> {
    match format {
        ImageFormat::Pgm => decode_pgm(bytes),
        ImageFormat::Png => decode_png(bytes),
    }
}

/// Encodes `img`, clamping to `[0, 1]` and rounding half away from zero.
pub fn save_image(
    img: &Image,
    format: ImageFormat,
    bit_depth: BitDepth,
) -> Result<Vec<u8>, ImageError> {
    let samples = quantize(img, bit_depth);
    match format {
        ImageFormat::Pgm => Ok(encode_pgm(img.width, img.height, &samples, bit_depth)),
        ImageFormat::Png => encode_png(img.width, img.height, &samples, bit_depth),
    }
}

fn quantize(img: &Image, bit_depth: BitDepth) -> Vec<u16> {
    let max = bit_depth.max_value() as f64;
    // f64::round is half-away-from-zero; after clamping everything is non-negative.
    img.data
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * max).round() as u16)
        .collect()
}

fn samples_to_bytes(samples: &[u16], bit_depth: BitDepth) -> Vec<u8> {
    match bit_depth {
        BitDepth::Eight => samples.iter().map(|&s| s as u8).collect(),
        BitDepth::Sixteen => samples.iter().flat_map(|s| s.to_be_bytes()).collect(),
    }
}

fn encode_pgm(width: usize, height: usize, samples: &[u16], bit_depth: BitDepth) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n{}\n", bit_depth.max_value()).into_bytes();
    out.extend(samples_to_bytes(samples, bit_depth));
    out
}

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn read_uint(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::MalformedHeader(format!("{what} out of range")))
    }
}

fn decode_pgm(bytes: &[u8]) -> Result<Decoded, ImageError> {
    match bytes.get(..2) {
        Some(b"P5") => {}
        Some(b"P6") => return Err(ImageError::MultiChannel("PPM (P6)".into())),
        Some(b"P7") => return Err(ImageError::MultiChannel("PAM (P7)".into())),
        _ => {
            return Err(ImageError::MalformedHeader(
                "expected binary PGM magic P5".into(),
            ))
        }
    }
    let mut cur = PgmCursor { bytes, pos: 2 };
    let width = cur.read_uint("width")? as usize;
    let height = cur.read_uint("height")? as usize;
    let maxval = cur.read_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(ImageError::MalformedHeader(format!(
            "maxval {maxval} outside 1..=65535"
        )));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(ImageError::MalformedHeader(
                "missing separator after maxval".into(),
            ))
        }
    }
    let (bit_depth, bytes_per_sample) = if maxval < 256 {
        (BitDepth::Eight, 1)
    } else {
        (BitDepth::Sixteen, 2)
    };
    let expected = width * height * bytes_per_sample;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(ImageError::Truncated(format!(
            "expected {expected} sample bytes, found {}",
            payload.len()
        )));
    }
    let scale = maxval as f64;
    let data = match bit_depth {
        BitDepth::Eight => payload[..expected]
            .iter()
            .map(|&b| b as f64 / scale)
            .collect(),
        BitDepth::Sixteen => payload[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
            .collect(),
    };
    Ok(Decoded {
        image: Image::new(width, height, data)?,
        bit_depth,
    })
}

fn decode_png(bytes: &[u8]) -> Result<Decoded, ImageError> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(png_error)?;
    let info = reader.info();
    let (width, height) = (info.width as usize, info.height as usize);
    let color = info.color_type;
    let depth = info.bit_depth;
    if color != png::ColorType::Grayscale {
        return Err(ImageError::MultiChannel(format!(
            "PNG color type {color:?}"
        )));
    }
    let bit_depth = match depth {
        png::BitDepth::Eight => BitDepth::Eight,
        png::BitDepth::Sixteen => BitDepth::Sixteen,
        other => return Err(ImageError::UnsupportedBitDepth(other as u32)),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::MalformedHeader("image too large".into()))?;
    let mut buf = vec![0u8; size];
    reader.next_frame(&mut buf).map_err(png_error)?;
    let scale = bit_depth.max_value() as f64;
    let data: Vec<f64> = match bit_depth {
        BitDepth::Eight => buf.iter().map(|&b| b as f64 / scale).collect(),
        BitDepth::Sixteen => buf
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
            .collect(),
    };
    Ok(Decoded {
        image: Image::new(width, height, data)?,
        bit_depth,
    })
}

fn png_error(e: png::DecodingError) -> ImageError {
    match e {
        png::DecodingError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            ImageError::Truncated(io.to_string())
        }
        other => ImageError::MalformedHeader(other.to_string()),
    }
}

fn encode_png(
    width: usize,
    height: usize,
    samples: &[u16],
    bit_depth: BitDepth,
) -> Result<Vec<u8>, ImageError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width as u32, height as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(match bit_depth {
            BitDepth::Eight => png::BitDepth::Eight,
            BitDepth::Sixteen => png::BitDepth::Sixteen,
        });
        let mut writer = encoder
            .write_header()
            .map_err(|e| ImageError::Encode(e.to_string()))?;
        writer
            .write_image_data(&samples_to_bytes(samples, bit_depth))
            .map_err(|e| ImageError::Encode(e.to_string()))?;
        writer
            .finish()
            .map_err(|e| ImageError::Encode(e.to_string()))?;
    }
    Ok(out)
}
