//! 8-bit RGB raster plus PNG and binary PPM (P6) codecs.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

/// File format, chosen by extension when saving and by signature when loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "png" => Ok(ImageFormat::Png),
            "ppm" => Ok(ImageFormat::Ppm),
            _ => Err(Error::UnsupportedFormat(format!(
                "{}: expected a .png or .ppm extension",
                path.display()
            ))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Ppm => "ppm",
        }
    }
}

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

impl Image {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!(
                "image dimensions {width}x{height} must be positive"
            )));
        }
        let expected = width as u64 * height as u64;
        if pixels.len() as u64 != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    /// Image filled with a single color.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        Image::new(width, height, vec![rgb; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.starts_with(&PNG_SIGNATURE) {
            decode_png(bytes)
        } else if bytes.starts_with(b"P6") {
            decode_ppm(bytes)
        } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
            Err(Error::UnsupportedFormat(format!(
                "PNM variant P{} (only binary P6 is supported)",
                bytes[1] as char
            )))
        } else {
            Err(Error::UnsupportedFormat(
                "unrecognized file signature".into(),
            ))
        }
    }

    pub fn encode(&self, format: ImageFormat) -> Result<Vec<u8>> {
        match format {
            ImageFormat::Png => encode_png(self),
            ImageFormat::Ppm => Ok(encode_ppm(self)),
        }
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    Image::decode(&fs::read(path)?)
}

/// Writes PNG or P6 depending on the extension of `path`.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = img.encode(ImageFormat::from_path(path)?)?;
    fs::write(path, bytes)?;
    Ok(())
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Malformed(e.to_string()))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    match color {
        png::ColorType::Rgb => {}
        png::ColorType::Rgba | png::ColorType::GrayscaleAlpha => {
            return Err(Error::UnsupportedFormat("PNG with alpha channel".into()))
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PNG color type {other:?} (expected RGB)"
            )))
        }
    }
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedBitDepth(format!(
            "PNG with {} bits per channel",
            depth as u8
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Malformed("PNG dimensions overflow".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Malformed(e.to_string()))?;
    let data = &buf[..frame.buffer_size()];
    let (w, h) = (frame.width, frame.height);
    let row = w as usize * 3;
    let mut pixels = Vec::with_capacity(w as usize * h as usize);
    for line in data.chunks(frame.line_size).take(h as usize) {
        pixels.extend(line[..row].chunks_exact(3).map(|p| [p[0], p[1], p[2]]));
    }
    Image::new(w, h, pixels).map_err(|e| Error::Malformed(e.to_string()))
}

fn encode_png(img: &Image) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width, img.height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(png_write_error)?;
        let data: Vec<u8> = img.pixels.iter().flatten().copied().collect();
        writer.write_image_data(&data).map_err(png_write_error)?;
        writer.finish().map_err(png_write_error)?;
    }
    Ok(out)
}

fn png_write_error(e: png::EncodingError) -> Error {
    match e {
        png::EncodingError::IoError(io) => Error::Io(io),
        other => Error::Malformed(other.to_string()),
    }
}

/// Reads the next whitespace-delimited header token, skipping `#` comments.
fn ppm_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Malformed("truncated PPM header".into()));
    }
    Ok(&bytes[start..*pos])
}

fn ppm_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32> {
    let tok = ppm_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            Error::Malformed(format!(
                "invalid PPM {what} {:?}",
                String::from_utf8_lossy(tok)
            ))
        })
}

fn decode_ppm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 2;
    let width = ppm_number(bytes, &mut pos, "width")?;
    let height = ppm_number(bytes, &mut pos, "height")?;
    let maxval = ppm_number(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Malformed(format!("PPM dimensions {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedBitDepth(format!(
            "PPM maxval {maxval} (expected 255)"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Malformed("truncated PPM header".into()));
    }
    pos += 1;
    let len = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Malformed("PPM dimensions overflow".into()))?;
    let body = &bytes[pos..];
    if body.len() < len {
        return Err(Error::Malformed(format!(
            "truncated PPM raster: {} of {len} bytes",
            body.len()
        )));
    }
    let pixels = body[..len]
        .chunks_exact(3)
        .map(|p| [p[0], p[1], p[2]])
        .collect();
    Image::new(width, height, pixels)
}

fn encode_ppm(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.reserve(img.pixels.len() * 3);
    out.extend(img.pixels.iter().flatten());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_ppm() {
        let img = Image::decode(b"P6\n1 1\n255\n\xff\x00\x00").unwrap();
        assert_eq!(img, Image::new(1, 1, vec![[255, 0, 0]]).unwrap());
    }

    #[test]
    fn ppm_header_comments() {
        let img =
            Image::decode(b"P6 # made by hand\n2 1 # size\n255\n\x01\x02\x03\x04\x05\x06").unwrap();
        assert_eq!(img.pixels(), &[[1, 2, 3], [4, 5, 6]]);
    }

    #[test]
    fn truncated_ppm_is_malformed() {
        let err = Image::decode(b"P6\n2 2\n255\n\x00\x00\x00").unwrap_err();
        assert!(matches!(err, Error::Malformed(_)), "{err}");
        assert!(matches!(Image::decode(b"P6\n2"), Err(Error::Malformed(_))));
    }

    #[test]
    fn ppm_rejects_wide_samples_and_ascii_variant() {
        assert!(matches!(
            Image::decode(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00"),
            Err(Error::UnsupportedBitDepth(_))
        ));
        assert!(matches!(
            Image::decode(b"P3\n1 1\n255\n0 0 0\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            Image::decode(b"GIF89a"),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn png_round_trip() {
        let img = Image::new(
            2,
            2,
            vec![[1, 2, 3], [255, 0, 128], [0, 0, 0], [9, 99, 199]],
        )
        .unwrap();
        let bytes = img.encode(ImageFormat::Png).unwrap();
        assert_eq!(Image::decode(&bytes).unwrap(), img);
    }

    #[test]
    fn png_with_alpha_is_rejected() {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 1, 1);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(&[1, 2, 3, 4]).unwrap();
        }
        assert!(matches!(
            Image::decode(&out),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn png_sixteen_bit_is_rejected() {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 1, 1);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Sixteen);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(&[0; 6]).unwrap();
        }
        assert!(matches!(
            Image::decode(&out),
            Err(Error::UnsupportedBitDepth(_))
        ));
    }

    #[test]
    fn dimension_checks() {
        assert!(Image::new(2, 2, vec![[0; 3]; 3]).is_err());
        assert!(Image::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            ImageFormat::from_path(Path::new("a/b.PNG")).unwrap(),
            ImageFormat::Png
        );
        assert_eq!(
            ImageFormat::from_path(Path::new("x.ppm")).unwrap(),
            ImageFormat::Ppm
        );
        assert!(ImageFormat::from_path(Path::new("x.jpg")).is_err());
    }
}
