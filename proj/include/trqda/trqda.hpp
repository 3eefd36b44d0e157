#ifndef TRQDA_TRQDA_HPP
#define TRQDA_TRQDA_HPP

#include "trqda/tensor.hpp"
#include "trqda/model.hpp"
#include "trqda/verify.hpp"
#include "trqda/oracle.hpp"
#include "trqda/problems.hpp"
#include "trqda/subproblem.hpp"
#include "trqda/certify.hpp"
#include "trqda/step.hpp"
#include "trqda/config.hpp"
#include "trqda/driver.hpp"
#include "trqda/reference.hpp"
#include "trqda/bounds.hpp"
#include "trqda/audit.hpp"
#include "trqda/runspec.hpp"
#include "trqda/history_io.hpp"
#include "trqda/study.hpp"

#endif  // TRQDA_TRQDA_HPP
