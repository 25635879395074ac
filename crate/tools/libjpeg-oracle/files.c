/*
 * JPEG file fixtures for the parser tests.
 *
 *   files write DIR      write small libjpeg-encoded fixtures into DIR
 *   files dump FILE...   print one JSON line per file: header fields,
 *                        quantization tables, SHA-256 of each component's
 *                        coefficients (int16 LE, block raster, natural order)
 *                        and of the islow-decoded interleaved pixels
 *
 * Build:  cc -O2 -o files files.c -ljpeg -lcrypto
 * Run:    JSIMD_FORCENONE=1 ./files write DIR && JSIMD_FORCENONE=1 ./files dump DIR/*.jpg
 */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <stdint.h>
#include <setjmp.h>
#include <jpeglib.h>
#include <openssl/sha.h>

static uint64_t sm_state = 0x5eed;

static uint64_t next_u64(void) {
  uint64_t z = (sm_state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

static unsigned char *pattern(int w, int h, int comps) {
  unsigned char *px = malloc((size_t)w * h * comps);
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++)
      for (int c = 0; c < comps; c++) {
        int v = 40 + (x * 160) / w + ((y * 7 + c * 31) % 50) + (int)(next_u64() % 25);
        if ((x / 10 + y / 10) % 2) v = 255 - v;
        px[((size_t)y * w + x) * comps + c] = (unsigned char)(v < 0 ? 0 : v > 255 ? 255 : v);
      }
  return px;
}

struct opts {
  const char *name;
  int w, h, comps, qf;
  int subsample, progressive, restart, optimize, arith;
};

static void write_one(const char *dir, struct opts o) {
  char path[1024];
  snprintf(path, sizeof path, "%s/%s", dir, o.name);
  FILE *f = fopen(path, "wb");
  if (!f) { perror(path); exit(1); }
  unsigned char *px = pattern(o.w, o.h, o.comps);
  struct jpeg_compress_struct c;
  struct jpeg_error_mgr err;
  c.err = jpeg_std_error(&err);
  jpeg_create_compress(&c);
  jpeg_stdio_dest(&c, f);
  c.image_width = o.w;
  c.image_height = o.h;
  c.input_components = o.comps;
  c.in_color_space = o.comps == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&c);
  jpeg_set_quality(&c, o.qf, TRUE);
  c.dct_method = JDCT_ISLOW;
  c.optimize_coding = o.optimize;
  c.restart_interval = o.restart;
  c.arith_code = o.arith;
  if (!o.subsample)
    for (int i = 0; i < c.num_components; i++)
      c.comp_info[i].h_samp_factor = c.comp_info[i].v_samp_factor = 1;
  if (o.progressive) jpeg_simple_progression(&c);
  jpeg_start_compress(&c, TRUE);
  while (c.next_scanline < c.image_height) {
    JSAMPROW row = &px[(size_t)c.next_scanline * o.w * o.comps];
    jpeg_write_scanlines(&c, &row, 1);
  }
  jpeg_finish_compress(&c);
  jpeg_destroy_compress(&c);
  fclose(f);
  free(px);
}

static void hex(const unsigned char *d, size_t n) {
  unsigned char md[32];
  SHA256(d, n, md);
  putchar('"');
  for (int i = 0; i < 32; i++) printf("%02x", md[i]);
  putchar('"');
}

static void dump(const char *path) {
  FILE *f = fopen(path, "rb");
  if (!f) { perror(path); exit(1); }
  const char *base = strrchr(path, '/');
  base = base ? base + 1 : path;
  struct jpeg_decompress_struct d;
  struct jpeg_error_mgr err;
  d.err = jpeg_std_error(&err);
  jpeg_create_decompress(&d);
  jpeg_stdio_src(&d, f);
  jpeg_read_header(&d, TRUE);
  printf("{\"file\":\"%s\",\"width\":%u,\"height\":%u,\"components\":%d,\"restart_interval\":%u,",
         base, d.image_width, d.image_height, d.num_components, d.restart_interval);
  jvirt_barray_ptr *arrays = jpeg_read_coefficients(&d);
  printf("\"qtables\":[");
  for (int ch = 0; ch < d.num_components; ch++) {
    JQUANT_TBL *t = d.comp_info[ch].quant_table;
    printf("%s[", ch ? "," : "");
    for (int k = 0; k < 64; k++) printf("%s%u", k ? "," : "", t->quantval[k]);
    printf("]");
  }
  printf("],\"blocks\":[");
  for (int ch = 0; ch < d.num_components; ch++) {
    jpeg_component_info *ci = &d.comp_info[ch];
    printf("%s[%u,%u]", ch ? "," : "", ci->width_in_blocks, ci->height_in_blocks);
  }
  printf("],\"coef_sha256\":[");
  for (int ch = 0; ch < d.num_components; ch++) {
    jpeg_component_info *ci = &d.comp_info[ch];
    size_t n = (size_t)ci->width_in_blocks * ci->height_in_blocks * 64;
    unsigned char *buf = malloc(n * 2);
    size_t o = 0;
    for (JDIMENSION by = 0; by < ci->height_in_blocks; by++) {
      JBLOCKARRAY rows = (*d.mem->access_virt_barray)((j_common_ptr)&d, arrays[ch], by, 1, FALSE);
      for (JDIMENSION bx = 0; bx < ci->width_in_blocks; bx++)
        for (int k = 0; k < 64; k++) {
          uint16_t v = (uint16_t)rows[0][bx][k];
          buf[o++] = v & 0xff;
          buf[o++] = v >> 8;
        }
    }
    if (ch) putchar(',');
    hex(buf, n * 2);
    free(buf);
  }
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);

  rewind(f);
  d.err = jpeg_std_error(&err);
  jpeg_create_decompress(&d);
  jpeg_stdio_src(&d, f);
  jpeg_read_header(&d, TRUE);
  d.dct_method = JDCT_ISLOW;
  d.out_color_space = d.num_components == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_start_decompress(&d);
  size_t stride = (size_t)d.output_width * d.output_components;
  unsigned char *px = malloc(stride * d.output_height);
  while (d.output_scanline < d.output_height) {
    JSAMPROW row = &px[d.output_scanline * stride];
    jpeg_read_scanlines(&d, &row, 1);
  }
  printf("],\"pixels_sha256\":");
  hex(px, stride * d.output_height);
  printf("}\n");
  free(px);
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);
  fclose(f);
}

int main(int argc, char **argv) {
  if (argc >= 3 && !strcmp(argv[1], "write")) {
    struct opts all[] = {
      {"gray_q75.jpg", 44, 28, 1, 75, 0, 0, 0, 0, 0},
      {"color444_q90_dri.jpg", 40, 24, 3, 90, 0, 0, 2, 0, 0},
      {"color444_q60_opt.jpg", 32, 32, 3, 60, 0, 0, 3, 1, 0},
      {"color420_q75.jpg", 32, 32, 3, 75, 1, 0, 0, 0, 0},
      {"progressive_q75.jpg", 32, 32, 1, 75, 0, 1, 0, 0, 0},
      {"arithmetic_q75.jpg", 32, 32, 1, 75, 0, 0, 0, 0, 1},
    };
    for (size_t i = 0; i < sizeof all / sizeof all[0]; i++) write_one(argv[2], all[i]);
    return 0;
  }
  if (argc >= 3 && !strcmp(argv[1], "dump")) {
    for (int i = 2; i < argc; i++) dump(argv[i]);
    return 0;
  }
  fprintf(stderr, "usage: files write DIR | files dump FILE...\n");
  return 2;
}
