#include "duoseg/volume.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace duoseg {

Volume::Volume(Tensor<float> v, std::array<float, 3> sp) : voxels(std::move(v)), spacing(sp) {
  check_data(voxels.ndim() == 3, "Volume expects a 3-d tensor");
}

void Volume::validate() const {
  check_data(voxels.ndim() == 3, "Volume expects a 3-d tensor");
  for (float s : spacing) check_data(s > 0.f, "Volume spacing must be positive");
  for (int64_t i = 0; i < voxels.numel(); ++i)
    check_data(std::isfinite(voxels[i]), "Volume contains non-finite voxels");
}

int64_t LabelMask::foreground_count() const {
  int64_t n = 0;
  for (int64_t i = 0; i < voxels.numel(); ++i) n += voxels[i] != 0;
  return n;
}

void LabelMask::validate() const {
  check_data(voxels.ndim() == 3, "LabelMask expects a 3-d tensor");
  for (float s : spacing) check_data(s > 0.f, "LabelMask spacing must be positive");
  for (int64_t i = 0; i < voxels.numel(); ++i)
    check_data(voxels[i] == 0 || voxels[i] == 1, "LabelMask values must be 0 or 1");
}

void GradientVolume::validate() const {
  check_data(channels.ndim() == 4 && channels.dim(0) == 3,
             "GradientVolume expects a (3, h, w, l) tensor");
}

namespace {

constexpr char kMagic[8] = {'R', 'V', 'O', 'L', '0', '0', '0', '1'};
constexpr size_t kHeaderSize = 64;

void put_u32(uint8_t* p, uint32_t v) { std::memcpy(p, &v, 4); }
void put_f32(uint8_t* p, float v) { std::memcpy(p, &v, 4); }
uint32_t get_u32(const uint8_t* p) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}
float get_f32(const uint8_t* p) {
  float v;
  std::memcpy(&v, p, 4);
  return v;
}

struct RvolHeader {
  uint32_t h, w, l;
  std::array<float, 3> spacing;
  uint8_t dtype;
};

void write_header(std::ofstream& f, const RvolHeader& hd) {
  uint8_t buf[kHeaderSize] = {0};
  std::memcpy(buf, kMagic, 8);
  put_u32(buf + 8, hd.h);
  put_u32(buf + 12, hd.w);
  put_u32(buf + 16, hd.l);
  put_f32(buf + 20, hd.spacing[0]);
  put_f32(buf + 24, hd.spacing[1]);
  put_f32(buf + 28, hd.spacing[2]);
  buf[32] = hd.dtype;
  f.write(reinterpret_cast<const char*>(buf), kHeaderSize);
}

RvolHeader read_header(std::ifstream& f, const std::string& path) {
  uint8_t buf[kHeaderSize];
  f.read(reinterpret_cast<char*>(buf), kHeaderSize);
  check_data(bool(f), "truncated RVOL header: " + path);
  check_data(std::memcmp(buf, kMagic, 8) == 0, "bad RVOL magic: " + path);
  RvolHeader hd;
  hd.h = get_u32(buf + 8);
  hd.w = get_u32(buf + 12);
  hd.l = get_u32(buf + 16);
  hd.spacing = {get_f32(buf + 20), get_f32(buf + 24), get_f32(buf + 28)};
  hd.dtype = buf[32];
  check_data(hd.h > 0 && hd.w > 0 && hd.l > 0, "degenerate RVOL dims: " + path);
  check_data(hd.spacing[0] > 0 && hd.spacing[1] > 0 && hd.spacing[2] > 0,
             "non-positive RVOL spacing: " + path);
  return hd;
}

}  // namespace

void write_rvol(const std::string& path, const Volume& v) {
  std::ofstream f(path, std::ios::binary);
  check_data(bool(f), "cannot open for writing: " + path);
  write_header(f, {uint32_t(v.dim(0)), uint32_t(v.dim(1)), uint32_t(v.dim(2)), v.spacing, 0});
  f.write(reinterpret_cast<const char*>(v.voxels.data()),
          std::streamsize(v.voxels.numel() * 4));
  check_data(bool(f), "write failed: " + path);
}

void write_rvol(const std::string& path, const LabelMask& m) {
  std::ofstream f(path, std::ios::binary);
  check_data(bool(f), "cannot open for writing: " + path);
  write_header(f, {uint32_t(m.dim(0)), uint32_t(m.dim(1)), uint32_t(m.dim(2)), m.spacing, 1});
  f.write(reinterpret_cast<const char*>(m.voxels.data()), std::streamsize(m.voxels.numel()));
  check_data(bool(f), "write failed: " + path);
}

Volume read_rvol_volume(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check_data(bool(f), "cannot open: " + path);
  const RvolHeader hd = read_header(f, path);
  check_data(hd.dtype == 0, "RVOL dtype is not f32: " + path);
  Volume v;
  v.voxels = Tensor<float>({int64_t(hd.h), int64_t(hd.w), int64_t(hd.l)});
  v.spacing = hd.spacing;
  f.read(reinterpret_cast<char*>(v.voxels.data()), std::streamsize(v.voxels.numel() * 4));
  check_data(bool(f), "truncated RVOL payload: " + path);
  return v;
}

LabelMask read_rvol_mask(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check_data(bool(f), "cannot open: " + path);
  const RvolHeader hd = read_header(f, path);
  check_data(hd.dtype == 1, "RVOL dtype is not u8: " + path);
  LabelMask m;
  m.voxels = Tensor<uint8_t>({int64_t(hd.h), int64_t(hd.w), int64_t(hd.l)});
  m.spacing = hd.spacing;
  f.read(reinterpret_cast<char*>(m.voxels.data()), std::streamsize(m.voxels.numel()));
  check_data(bool(f), "truncated RVOL payload: " + path);
  m.validate();
  return m;
}

int rvol_dtype(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check_data(bool(f), "cannot open: " + path);
  return read_header(f, path).dtype;
}

}  // namespace duoseg
