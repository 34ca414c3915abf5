#pragma once

/* Generated by cbindgen from the fedheart-ffi Rust sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Operation completed.
 */
#define FEDHEART_OK 0

/**
 * Invalid argument value or misuse of an operation contract.
 */
#define FEDHEART_ERR_USAGE 1

/**
 * Missing, unreadable or malformed data files.
 */
#define FEDHEART_ERR_DATA 2

/**
 * Numeric breakdown: singular system, non-finite loss, and the like.
 */
#define FEDHEART_ERR_NUMERIC 3

/**
 * A required pointer argument was null.
 */
#define FEDHEART_ERR_NULL_POINTER 4

/**
 * A string argument was not valid UTF-8.
 */
#define FEDHEART_ERR_ENCODING 5

/**
 * Opaque handle to a loaded, preprocessed dataset. Only ever passed by
 * pointer across the ABI; create with [`fedheart_dataset_load`] and
 * release with [`fedheart_dataset_free`].
 */
typedef struct FedheartDataset FedheartDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying library, as a newly allocated string.
 * Free with [`fedheart_string_free`].
 */
char *fedheart_version(void);

/**
 * Copy of the message recorded by the most recent failing call on this
 * thread, or null when nothing has failed yet. Free with
 * [`fedheart_string_free`].
 */
char *fedheart_last_error_message(void);

/**
 * Release a string allocated by this library. Null is a no-op.
 */
void fedheart_string_free(char *s);

/**
 * Load the four hospital files under `dir` and preprocess them into a
 * modelling table. `features` picks the column subset — `"table4"` (the
 * default when null) or `"full"` — and rows with a missing value in any
 * kept column are dropped. On success a new handle is written to `out`;
 * release it with [`fedheart_dataset_free`].
 */
uint32_t fedheart_dataset_load(const char *dir, const char *features, struct FedheartDataset **out);

/**
 * Release a dataset handle. Null is a no-op.
 */
void fedheart_dataset_free(struct FedheartDataset *ds);

/**
 * Row and feature counts of a loaded dataset.
 */
uint32_t fedheart_dataset_shape(const struct FedheartDataset *ds,
                                uintptr_t *out_rows,
                                uintptr_t *out_features);

/**
 * Fraction of positive (disease-present) labels in the dataset.
 */
uint32_t fedheart_dataset_prevalence(const struct FedheartDataset *ds, double *out);

/**
 * Name of feature column `index`, as a newly allocated string. Free with
 * [`fedheart_string_free`].
 */
uint32_t fedheart_dataset_feature_name(const struct FedheartDataset *ds,
                                       uintptr_t index,
                                       char **out);

/**
 * Train the tuned `family` model on a seeded 66/34 split of the pooled
 * data and write its held-out accuracy. `family` is one of `lr`, `nn1`,
 * `svm`, `nb`, `dt`, `rf`, `knn` (case-insensitive).
 */
uint32_t fedheart_centralized_accuracy(const struct FedheartDataset *ds,
                                       const char *family,
                                       uint64_t seed,
                                       double *out);

/**
 * Run the four-client federated simulation for `rounds` rounds of
 * `local_steps` local SGD steps under `strategy` (`fedavg`, `fedadam`,
 * `fedyogi` or `scaffold`), once per seed in `seeds[0..n_seeds]`, and
 * write the mean and population standard deviation of the final
 * weighted cross-client accuracy.
 */
uint32_t fedheart_federated_accuracy(const struct FedheartDataset *ds,
                                     const char *family,
                                     const char *strategy,
                                     uint32_t rounds,
                                     uint32_t local_steps,
                                     const uint64_t *seeds,
                                     uintptr_t n_seeds,
                                     double *out_mean,
                                     double *out_std);

/**
 * Mean-absolute Shapley attribution of every feature for one tuned
 * `family` model, trained on a seeded 66/34 split and explained on the
 * held-out rows against a `background`-row reference sample.
 * `out_mean_abs` must point to `n_features` writable doubles (see
 * [`fedheart_dataset_shape`]); `out_ranks`, when non-null, receives the
 * 1-based importance rank of each feature in the same order.
 */
uint32_t fedheart_shap_mean_abs(const struct FedheartDataset *ds,
                                const char *family,
                                uint64_t seed,
                                uintptr_t background,
                                double *out_mean_abs,
                                uint32_t *out_ranks);

/**
 * One-shot experiment runner mirroring the `bench` binary: load the data
 * under `data_dir`, run `experiment` (`centralized`, `federated`,
 * `local-baseline`, `shap` or `grid-search`) with that experiment's
 * default model families, and write the rendered report to `out_report`
 * as a newly allocated string. `seeds` accepts `"a..b"` or a comma list
 * (null → `"0..9"`); `features` and `format` default to `"table4"` and
 * `"markdown"` when null. Free the report with [`fedheart_string_free`].
 */
uint32_t fedheart_bench_render(const char *data_dir,
                               const char *experiment,
                               const char *seeds,
                               uint32_t rounds,
                               uint32_t local_steps,
                               const char *features,
                               const char *format,
                               char **out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
