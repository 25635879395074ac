/*
 * Golden-vector generator for the bit-exact codec tests.
 *
 * Runs blocks through the system libjpeg (compress -> read coefficients ->
 * decompress) and prints one JSON object per configuration with SHA-256
 * digests of every output plus a few full samples for diagnostics.
 *
 * Build:  cc -O2 -o oracle oracle.c -ljpeg -lcrypto
 * Run:    JSIMD_FORCENONE=1 ./oracle > ../../crates/core/tests/fixtures/libjpeg_golden.jsonl
 *
 * The block generator below is mirrored in crates/core/tests/common/golden.rs;
 * both sides must stay in sync.
 */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <stdint.h>
#include <jpeglib.h>
#include <openssl/sha.h>

#define BLOCKS_PER_ROW 100
#define SAMPLES 4

static uint64_t sm_state;

static uint64_t next_u64(void) {
  uint64_t z = (sm_state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

static int rnd(int n) { return (int)(next_u64() % (uint64_t)n); }

static int clamp255(int v) { return v < 0 ? 0 : (v > 255 ? 255 : v); }

/* One 8x8 plane, row-major. */
static void gen_plane(int kind, unsigned char *out) {
  int x, y;
  switch (kind) {
  case 0:
    for (int i = 0; i < 64; i++) out[i] = (unsigned char)rnd(256);
    break;
  case 1: {
    int base = 32 + rnd(192);
    int gx = rnd(33) - 16, gy = rnd(33) - 16;
    int a = rnd(9);
    for (y = 0; y < 8; y++)
      for (x = 0; x < 8; x++) {
        int v = base + (gx * (x - 4) + gy * (y - 4)) / 4 + rnd(2 * a + 1) - a;
        out[y * 8 + x] = (unsigned char)clamp255(v);
      }
    break;
  }
  case 2: {
    int v = rnd(256);
    for (int i = 0; i < 64; i++) out[i] = (unsigned char)v;
    break;
  }
  default:
    for (int i = 0; i < 64; i++) out[i] = (unsigned char)(64 + rnd(128));
    break;
  }
}

/* Random quantized coefficients for one plane, natural order. */
static void gen_coefs(const unsigned short *q, short *out) {
  int sparse = rnd(2);
  for (int k = 0; k < 64; k++) {
    int row = k / 8, col = k % 8;
    int amp;
    if (k == 0)
      amp = 1 + 1000 / q[0];
    else if (sparse)
      amp = 0;
    else
      amp = 1 + 400 / (q[k] * (1 + row + col));
    out[k] = (short)(rnd(2 * amp + 1) - amp);
  }
}

struct mem_jpeg {
  unsigned char *buf;
  unsigned long size;
};

static void setup_compress(struct jpeg_compress_struct *c, int width, int height,
                           int comps, int qf, J_DCT_METHOD dct) {
  c->image_width = width;
  c->image_height = height;
  c->input_components = comps;
  c->in_color_space = comps == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(c);
  jpeg_set_quality(c, qf, TRUE);
  c->dct_method = dct;
  c->optimize_coding = TRUE;
  for (int i = 0; i < c->num_components; i++) {
    c->comp_info[i].h_samp_factor = 1;
    c->comp_info[i].v_samp_factor = 1;
  }
}

static struct mem_jpeg compress_image(const unsigned char *rgb, int width, int height,
                                      int comps, int qf, J_DCT_METHOD dct) {
  struct jpeg_compress_struct c;
  struct jpeg_error_mgr err;
  struct mem_jpeg out = {NULL, 0};
  c.err = jpeg_std_error(&err);
  jpeg_create_compress(&c);
  jpeg_mem_dest(&c, &out.buf, &out.size);
  setup_compress(&c, width, height, comps, qf, dct);
  jpeg_start_compress(&c, TRUE);
  while (c.next_scanline < c.image_height) {
    JSAMPROW row = (JSAMPROW)&rgb[c.next_scanline * width * comps];
    jpeg_write_scanlines(&c, &row, 1);
  }
  jpeg_finish_compress(&c);
  jpeg_destroy_compress(&c);
  return out;
}

/* Read quantized coefficients into (block, channel, 8, 8) layout. */
static void read_coefs(struct mem_jpeg *jpg, int nblocks, int comps, short *coefs,
                       unsigned short qt[3][64]) {
  struct jpeg_decompress_struct d;
  struct jpeg_error_mgr err;
  d.err = jpeg_std_error(&err);
  jpeg_create_decompress(&d);
  jpeg_mem_src(&d, jpg->buf, jpg->size);
  jpeg_read_header(&d, TRUE);
  jvirt_barray_ptr *arrays = jpeg_read_coefficients(&d);
  for (int ch = 0; ch < comps; ch++) {
    jpeg_component_info *ci = &d.comp_info[ch];
    JQUANT_TBL *t = ci->quant_table;
    for (int k = 0; k < 64; k++) qt[ch][k] = t->quantval[k];
    for (JDIMENSION by = 0; by < ci->height_in_blocks; by++) {
      JBLOCKARRAY rows = (*d.mem->access_virt_barray)((j_common_ptr)&d, arrays[ch], by, 1, FALSE);
      for (JDIMENSION bx = 0; bx < ci->width_in_blocks; bx++) {
        int b = by * BLOCKS_PER_ROW + bx;
        if (b >= nblocks) continue;
        for (int k = 0; k < 64; k++)
          coefs[((size_t)b * comps + ch) * 64 + k] = rows[0][bx][k];
      }
    }
  }
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);
}

/* Rewrite the coefficients of a template JPEG and return the new stream. */
static struct mem_jpeg write_coefs(struct mem_jpeg *tmpl, int nblocks, int comps,
                                   const short *coefs) {
  struct jpeg_decompress_struct d;
  struct jpeg_compress_struct c;
  struct jpeg_error_mgr e1, e2;
  struct mem_jpeg out = {NULL, 0};
  d.err = jpeg_std_error(&e1);
  jpeg_create_decompress(&d);
  jpeg_mem_src(&d, tmpl->buf, tmpl->size);
  jpeg_read_header(&d, TRUE);
  jvirt_barray_ptr *arrays = jpeg_read_coefficients(&d);
  for (int ch = 0; ch < comps; ch++) {
    jpeg_component_info *ci = &d.comp_info[ch];
    for (JDIMENSION by = 0; by < ci->height_in_blocks; by++) {
      JBLOCKARRAY rows = (*d.mem->access_virt_barray)((j_common_ptr)&d, arrays[ch], by, 1, TRUE);
      for (JDIMENSION bx = 0; bx < ci->width_in_blocks; bx++) {
        int b = by * BLOCKS_PER_ROW + bx;
        for (int k = 0; k < 64; k++)
          rows[0][bx][k] = b < nblocks ? coefs[((size_t)b * comps + ch) * 64 + k] : 0;
      }
    }
  }
  c.err = jpeg_std_error(&e2);
  jpeg_create_compress(&c);
  jpeg_mem_dest(&c, &out.buf, &out.size);
  jpeg_copy_critical_parameters(&d, &c);
  c.optimize_coding = TRUE;
  jpeg_write_coefficients(&c, arrays);
  jpeg_finish_compress(&c);
  jpeg_destroy_compress(&c);
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);
  return out;
}

/* Decode to pixels in (block, channel, 8, 8) layout. */
static void decode_pixels(struct mem_jpeg *jpg, int nblocks, int comps, J_DCT_METHOD dct,
                          unsigned char *pixels) {
  struct jpeg_decompress_struct d;
  struct jpeg_error_mgr err;
  d.err = jpeg_std_error(&err);
  jpeg_create_decompress(&d);
  jpeg_mem_src(&d, jpg->buf, jpg->size);
  jpeg_read_header(&d, TRUE);
  d.dct_method = dct;
  d.out_color_space = comps == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_start_decompress(&d);
  int width = d.output_width;
  unsigned char *row = malloc((size_t)width * comps);
  while (d.output_scanline < d.output_height) {
    int y = d.output_scanline;
    jpeg_read_scanlines(&d, &row, 1);
    for (int x = 0; x < width; x++) {
      int b = (y / 8) * BLOCKS_PER_ROW + x / 8;
      if (b >= nblocks) continue;
      for (int ch = 0; ch < comps; ch++)
        pixels[((size_t)b * comps + ch) * 64 + (y % 8) * 8 + x % 8] = row[x * comps + ch];
    }
  }
  free(row);
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);
}

static void print_hex(const unsigned char *data, size_t len) {
  unsigned char h[SHA256_DIGEST_LENGTH];
  SHA256(data, len, h);
  putchar('"');
  for (int i = 0; i < SHA256_DIGEST_LENGTH; i++) printf("%02x", h[i]);
  putchar('"');
}

static void print_u8(const unsigned char *v, int n) {
  putchar('[');
  for (int i = 0; i < n; i++) printf(i ? ",%d" : "%d", v[i]);
  putchar(']');
}

static void print_i16(const short *v, int n) {
  putchar('[');
  for (int i = 0; i < n; i++) printf(i ? ",%d" : "%d", v[i]);
  putchar(']');
}

static void run(int comps, J_DCT_METHOD dct, const char *dct_name, int qf, int nblocks,
                uint64_t seed) {
  int rows = (nblocks + BLOCKS_PER_ROW - 1) / BLOCKS_PER_ROW;
  int width = BLOCKS_PER_ROW * 8, height = rows * 8;
  size_t plane = (size_t)nblocks * comps * 64;
  unsigned char *blocks = calloc(plane, 1);
  unsigned char *image = calloc((size_t)width * height * comps, 1);
  short *coefs = calloc(plane, sizeof(short));
  unsigned char *decoded = calloc(plane, 1);
  short *rcoefs = calloc(plane, sizeof(short));
  unsigned char *rdecoded = calloc(plane, 1);
  unsigned short qt[3][64];

  sm_state = seed;
  for (int b = 0; b < nblocks; b++) {
    int kind = rnd(4);
    for (int ch = 0; ch < comps; ch++) gen_plane(kind, &blocks[((size_t)b * comps + ch) * 64]);
  }
  for (int b = 0; b < nblocks; b++)
    for (int ch = 0; ch < comps; ch++)
      for (int k = 0; k < 64; k++) {
        int x = (b % BLOCKS_PER_ROW) * 8 + k % 8, y = (b / BLOCKS_PER_ROW) * 8 + k / 8;
        image[((size_t)y * width + x) * comps + ch] = blocks[((size_t)b * comps + ch) * 64 + k];
      }

  struct mem_jpeg jpg = compress_image(image, width, height, comps, qf, dct);
  read_coefs(&jpg, nblocks, comps, coefs, qt);
  decode_pixels(&jpg, nblocks, comps, dct, decoded);

  for (int b = 0; b < nblocks; b++)
    for (int ch = 0; ch < comps; ch++)
      gen_coefs(qt[ch], &rcoefs[((size_t)b * comps + ch) * 64]);
  struct mem_jpeg rjpg = write_coefs(&jpg, nblocks, comps, rcoefs);
  decode_pixels(&rjpg, nblocks, comps, dct, rdecoded);

  printf("{\"channels\":%d,\"dct\":\"%s\",\"qf\":%d,\"blocks\":%d,\"seed\":%llu,", comps,
         dct_name, qf, nblocks, (unsigned long long)seed);
  printf("\"qtables\":[");
  for (int ch = 0; ch < comps; ch++) {
    if (ch) putchar(',');
    putchar('[');
    for (int k = 0; k < 64; k++) printf(k ? ",%d" : "%d", qt[ch][k]);
    putchar(']');
  }
  printf("],\"input_sha256\":");
  print_hex(blocks, plane);
  printf(",\"coefs_sha256\":");
  {
    /* little-endian i16 */
    unsigned char *le = malloc(plane * 2);
    for (size_t i = 0; i < plane; i++) {
      le[2 * i] = (unsigned char)(coefs[i] & 0xff);
      le[2 * i + 1] = (unsigned char)((coefs[i] >> 8) & 0xff);
    }
    print_hex(le, plane * 2);
    free(le);
  }
  printf(",\"decoded_sha256\":");
  print_hex(decoded, plane);
  printf(",\"random_coef_decoded_sha256\":");
  print_hex(rdecoded, plane);
  printf(",\"samples\":[");
  for (int s = 0; s < SAMPLES && s < nblocks; s++) {
    size_t off = (size_t)s * comps * 64;
    if (s) putchar(',');
    printf("{\"pixels\":");
    print_u8(&blocks[off], comps * 64);
    printf(",\"coefs\":");
    print_i16(&coefs[off], comps * 64);
    printf(",\"decoded\":");
    print_u8(&decoded[off], comps * 64);
    printf(",\"random_coefs\":");
    print_i16(&rcoefs[off], comps * 64);
    printf(",\"random_decoded\":");
    print_u8(&rdecoded[off], comps * 64);
    putchar('}');
  }
  printf("]}\n");

  free(jpg.buf);
  free(rjpg.buf);
  free(blocks);
  free(image);
  free(coefs);
  free(decoded);
  free(rcoefs);
  free(rdecoded);
}

int main(void) {
  static const int qfs[] = {50, 75, 90, 100};
  for (int comps = 1; comps <= 3; comps += 2)
    for (int i = 0; i < 4; i++) {
      uint64_t seed = 0x5EED0000ULL + (uint64_t)comps * 1000 + qfs[i];
      run(comps, JDCT_ISLOW, "islow", qfs[i], 10000, seed);
      run(comps, JDCT_FLOAT, "float", qfs[i], 2000, seed + 7);
    }
  return 0;
}
