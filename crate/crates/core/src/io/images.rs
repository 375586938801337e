use std::path::Path;

use image::ExtendedColorType;

use super::IoError;
use crate::superpixel::Image;

/// Loads a PGM or PPM image (ASCII or binary) as Lab.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image, IoError> {
    let path = path.as_ref();
    let err = |message: String| IoError::Image {
        path: path.to_path_buf(),
        message,
    };
    let reader = image::ImageReader::open(path)
        .map_err(|e| IoError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| IoError::io(path, e))?;
    let img = reader.decode().map_err(|e| err(e.to_string()))?;
    let rgb = img.to_rgb8();
    Image::from_rgb8(rgb.width() as usize, rgb.height() as usize, rgb.as_raw()).map_err(|e| err(e.to_string()))
}

/// Saves interleaved 8-bit RGB; the format follows the extension (`.ppm`).
pub fn save_rgb(path: impl AsRef<Path>, width: usize, height: usize, rgb: &[u8]) -> Result<(), IoError> {
    let path = path.as_ref();
    image::save_buffer(path, rgb, width as u32, height as u32, ExtendedColorType::Rgb8).map_err(|e| IoError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_and_binary_formats_agree() {
        let dir = tempfile::tempdir().unwrap();
        let p2 = dir.path().join("a.pgm");
        std::fs::write(&p2, "P2\n2 1\n255\n0 200\n").unwrap();
        let p5 = dir.path().join("b.pgm");
        let mut bin = b"P5\n2 1\n255\n".to_vec();
        bin.extend([0u8, 200]);
        std::fs::write(&p5, bin).unwrap();
        let p3 = dir.path().join("c.ppm");
        std::fs::write(&p3, "P3\n2 1\n255\n0 0 0 200 200 200\n").unwrap();
        let p6 = dir.path().join("d.ppm");
        save_rgb(&p6, 2, 1, &[0, 0, 0, 200, 200, 200]).unwrap();
        let imgs: Vec<Image> = [p2, p5, p3, p6].iter().map(|p| load_image(p).unwrap()).collect();
        for img in &imgs[1..] {
            assert_eq!(img, &imgs[0]);
        }
        assert_eq!(imgs[0].width(), 2);
    }

    #[test]
    fn missing_and_garbage_files_fail() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_image(dir.path().join("none.ppm")).is_err());
        let bad = dir.path().join("bad.ppm");
        std::fs::write(&bad, "not an image").unwrap();
        assert!(load_image(&bad).is_err());
    }
}
